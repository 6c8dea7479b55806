#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "opine/corpus.hpp"

namespace testutil {

inline std::filesystem::path make_temp_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("opine-test-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::filesystem::path& path,
                              const std::string& content) {
  std::ofstream out(path);
  out << content;
  out.close();
  return path.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline opine::Post make_post(std::string id,
                             std::vector<std::string> token_surfaces,
                             std::optional<double> mpp = std::nullopt,
                             std::optional<double> ml = std::nullopt) {
  opine::Post post;
  post.id = std::move(id);
  std::vector<opine::Token> tokens;
  for (auto& surface : token_surfaces) {
    post.text_primary += surface;
    tokens.push_back(opine::Token{std::move(surface), std::nullopt});
  }
  post.tokens = std::move(tokens);
  post.mpp = mpp;
  post.ml = ml;
  return post;
}

inline opine::LabeledPair make_pair(const std::string& text1,
                                    const std::string& text2, int mpp_label,
                                    int ml_label) {
  opine::LabeledPair pair;
  pair.post1.id = "p1";
  pair.post1.text_primary = text1;
  pair.post2.id = "p2";
  pair.post2.text_primary = text2;
  pair.mpp_label = mpp_label;
  pair.ml_label = ml_label;
  return pair;
}

}  // namespace testutil
