/*
 * Copyright 2026 The HRR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// JSON-over-HTTP clients for embedding and reranking services.
//
//   POST {base_url}/embed   {"texts": [str...]}
//                        -> {"vectors": [[float...]...], "dimension": int}
//   POST {base_url}/rerank  {"query": str, "documents": [str...]}
//                        -> {"scores": [float...]}      (aligned with documents)
//
// Transport failures, timeouts and 5xx responses are retried with
// exponential backoff; 4xx responses are not. Exhausted retries raise
// ProviderUnavailable.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "hrr/embedding.hpp"
#include "hrr/error.hpp"
#include "hrr/rerank.hpp"

namespace hrr {

struct RemoteSettings {
  std::string base_url;
  int timeout_ms = 30000;
  int retries = 3;
  int backoff_ms = 200;
  int max_in_flight = 4;
  // Name of the environment variable holding a bearer token; empty for none.
  std::string api_key_env;

  void validate() const {
    if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0)
      fail(ErrorCode::InvalidConfig, "base_url must start with http:// or https://: '" + base_url + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base_url.rfind("https://", 0) == 0)
      fail(ErrorCode::InvalidConfig, "https base_url needs a build with CPPHTTPLIB_OPENSSL_SUPPORT");
#endif
    if (timeout_ms <= 0 || retries < 0 || backoff_ms < 0 || max_in_flight <= 0)
      fail(ErrorCode::InvalidConfig, "remote timeout/retries/backoff/max_in_flight out of range");
  }
};

namespace detail {

class JsonPoster {
 public:
  explicit JsonPoster(RemoteSettings settings)
      : settings_(std::move(settings)), slots_(std::clamp(settings_.max_in_flight, 1, 1024)) {
    settings_.validate();
    auto scheme_end = settings_.base_url.find("://") + 3;
    auto path_start = settings_.base_url.find('/', scheme_end);
    origin_ = settings_.base_url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = settings_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  nlohmann::json post(std::string_view endpoint, const nlohmann::json& body) const {
    const std::string path = prefix_ + std::string(endpoint);
    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!settings_.api_key_env.empty()) {
      if (const char* key = std::getenv(settings_.api_key_env.c_str()); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }

    std::string last_error;
    for (int attempt = 0; attempt <= settings_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(settings_.backoff_ms) * (1 << (attempt - 1)));
      }
      httplib::Result res{nullptr, httplib::Error::Unknown};
      {
        slots_.acquire();
        httplib::Client client(origin_);
        auto timeout = std::chrono::milliseconds(settings_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        res = client.Post(path, headers, payload, "application/json");
        slots_.release();
      }
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 200 && res->status < 300) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          fail(ErrorCode::InvalidResponse, origin_ + path + " returned malformed JSON: " + e.what());
        }
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500) break;
    }
    fail(ErrorCode::ProviderUnavailable, origin_ + path + ": " + last_error);
  }

 private:
  RemoteSettings settings_;
  std::string origin_;
  std::string prefix_;
  mutable std::counting_semaphore<1024> slots_;
};

}  // namespace detail

class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(RemoteSettings settings, std::size_t dimension)
      : poster_(std::move(settings)), dimension_(dimension) {
    if (dimension_ == 0) fail(ErrorCode::InvalidConfig, "embedding dimension must be positive");
  }

  std::string_view name() const override { return "remote"; }
  std::size_t dimension() const override { return dimension_; }

  std::vector<EmbeddingVector> embed(std::span<const std::string_view> texts) const override {
    auto body = nlohmann::json::object();
    auto arr = nlohmann::json::array();
    for (auto t : texts) arr.push_back(t);
    body["texts"] = std::move(arr);
    auto response = poster_.post("/embed", body);

    std::vector<EmbeddingVector> out;
    try {
      auto declared = response.at("dimension").get<std::size_t>();
      if (declared != dimension_) {
        fail(ErrorCode::DimensionMismatch,
             "service reports dimension " + std::to_string(declared) + ", expected " + std::to_string(dimension_));
      }
      const auto& vectors = response.at("vectors");
      if (!vectors.is_array() || vectors.size() != texts.size()) {
        fail(ErrorCode::InvalidResponse, "expected " + std::to_string(texts.size()) + " vectors");
      }
      for (const auto& v : vectors) {
        auto values = v.get<std::vector<float>>();
        if (values.size() != dimension_) {
          fail(ErrorCode::DimensionMismatch,
               "vector of length " + std::to_string(values.size()) + ", expected " + std::to_string(dimension_));
        }
        out.push_back(EmbeddingVector::normalize(std::move(values)));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::InvalidResponse, std::string("bad embed response: ") + e.what());
    }
    return out;
  }

 private:
  detail::JsonPoster poster_;
  std::size_t dimension_;
};

class RemoteReranker final : public RerankProvider {
 public:
  explicit RemoteReranker(RemoteSettings settings) : poster_(std::move(settings)) {}

  std::string_view name() const override { return "remote"; }

  std::vector<double> score(std::string_view query, std::span<const std::string_view> documents) const override {
    auto docs = nlohmann::json::array();
    for (auto d : documents) docs.push_back(d);
    nlohmann::json body{{"query", query}, {"documents", std::move(docs)}};
    auto response = poster_.post("/rerank", body);
    try {
      auto scores = response.at("scores").get<std::vector<double>>();
      if (scores.size() != documents.size()) {
        fail(ErrorCode::InvalidResponse, "expected " + std::to_string(documents.size()) + " scores, got " +
                                             std::to_string(scores.size()));
      }
      return scores;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::InvalidResponse, std::string("bad rerank response: ") + e.what());
    }
  }

 private:
  detail::JsonPoster poster_;
};

}  // namespace hrr
