// Copyright 2026 The mtpref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared fixtures for the unit and acceptance tests.

#ifndef MTPREF_TESTS_SUPPORT_TEST_SUPPORT_H_
#define MTPREF_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "mtpref/conversation.h"
#include "mtpref/random.h"

namespace mtpref::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mtpref-test-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Conversation with turns "<tag> u<i>" / "<tag> a<i>".
inline Conversation MakeConversation(std::size_t turns,
                                     const std::string& tag = "c") {
  std::vector<Turn> t;
  for (std::size_t i = 0; i < turns; ++i) {
    t.push_back({tag + " u" + std::to_string(i),
                 tag + " a" + std::to_string(i)});
  }
  return Conversation(tag, std::move(t));
}

// Pair sharing all but the last turn.
inline PreferencePair MakePair(std::size_t turns, const std::string& id) {
  PreferencePair p;
  p.id = id;
  p.chosen = MakeConversation(turns, id).WithId(id + "/c");
  std::vector<Turn> rej = p.chosen.turns();
  rej.back().assistant += " (worse)";
  p.rejected = Conversation(id + "/r", std::move(rej));
  p.shared_prefix_len = turns - 1;
  return p;
}

// Random printable text of 1..max_words words, never blank.
inline std::string RandomText(Rng& rng, std::size_t max_words = 8) {
  static constexpr std::string_view kAlphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,?!'\"{}"
      "\\/:;-_";
  const std::size_t words = 1 + UniformIndex(rng, max_words);
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    if (w > 0) out += (UniformIndex(rng, 6) == 0 ? "\n" : " ");
    const std::size_t len = 1 + UniformIndex(rng, 9);
    for (std::size_t i = 0; i < len; ++i) {
      out += kAlphabet[UniformIndex(rng, kAlphabet.size())];
    }
  }
  return out;
}

inline Conversation RandomConversation(Rng& rng, std::size_t max_turns = 5) {
  const std::size_t n = 1 + UniformIndex(rng, max_turns);
  std::vector<Turn> turns;
  for (std::size_t i = 0; i < n; ++i) {
    turns.push_back({RandomText(rng), RandomText(rng)});
  }
  return Conversation("r" + std::to_string(rng() % 100000), std::move(turns));
}

// An HTTP server on 127.0.0.1 and an ephemeral port, serving until
// destroyed.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&,
                                     httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(8); };
    server_.Post(".*", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }
  std::string url(const std::string& path = "/v1/chat/completions") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// Body of a successful chat completion carrying `content`.
inline std::string ChatResponse(const std::string& content) {
  return R"({"id":"x","choices":[{"index":0,"message":{"role":"assistant","content":)" +
         nlohmann::json(content).dump() + "}}]}";
}

}  // namespace mtpref::testing

#endif  // MTPREF_TESTS_SUPPORT_TEST_SUPPORT_H_
