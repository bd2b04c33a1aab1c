// Copyright 2026 The eevact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEVACT_STRICT_JSON_HPP_
#define EEVACT_STRICT_JSON_HPP_

#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <string_view>

#include "eevact/error.hpp"

namespace eevact {

// Reads optional fields of a JSON object, tracking which keys were consumed
// so finish() can reject unknown ones. Errors name the full dotted path.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ValidationError(where("") + " must be an object");
  }

  template <typename T>
  bool read(std::string_view key, T& out) {
    const std::string k(key);
    consumed_.insert(k);
    const auto it = object_.find(k);
    if (it == object_.end()) return false;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where(k) + ": " + e.what());
    }
    return true;
  }

  // Nested object, or nullptr when absent.
  const nlohmann::json* child(std::string_view key) {
    const std::string k(key);
    consumed_.insert(k);
    const auto it = object_.find(k);
    return it == object_.end() ? nullptr : &*it;
  }

  std::string where(std::string_view key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void finish() const {
    for (const auto& [key, value] : object_.items()) {
      if (!consumed_.contains(key)) throw ValidationError("unknown config key '" + where(key) + "'");
    }
  }

 private:
  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string> consumed_;
};

}  // namespace eevact

#endif  // EEVACT_STRICT_JSON_HPP_
