// Shared test fixtures: temp directories, synthetic corpora and manifest
// writers.
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "opgram/corpus.hpp"
#include "opgram/ngram.hpp"

namespace fixtures {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    path_ = base / ("opgram-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct SyntheticSpec {
  std::size_t benign_apps = 100;
  std::size_t malware_apps = 100;
  std::size_t methods_per_app = 30;
  std::size_t min_len = 5;
  std::size_t max_len = 50;
  std::size_t alphabet = 50;                    // opcode bytes 0x01..alphabet
  std::vector<std::vector<std::uint8_t>> planted;  // inserted into every malware app
  std::uint64_t seed = 42;
  std::size_t families = 0;  // > 0 assigns malware apps round-robin families
};

// Random corpus with optional planted malware-only byte sequences. Benign
// methods are re-rolled until they avoid every planted window, so the
// planted grams are perfect predictors by construction.
inline std::vector<opgram::AppRecord> make_synthetic_corpus(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> byte_dist(1, static_cast<int>(spec.alphabet));
  std::uniform_int_distribution<std::size_t> len_dist(spec.min_len, spec.max_len);

  auto contains_planted = [&](const opgram::MethodSequence& m) {
    for (const auto& p : spec.planted) {
      if (p.empty() || m.size() < p.size()) continue;
      for (std::size_t i = 0; i + p.size() <= m.size(); ++i) {
        if (std::equal(p.begin(), p.end(), m.begin() + i)) return true;
      }
    }
    return false;
  };

  auto random_method = [&](bool allow_planted) {
    opgram::MethodSequence m;
    do {
      m.clear();
      const std::size_t len = len_dist(rng);
      for (std::size_t i = 0; i < len; ++i) {
        m.push_back(static_cast<std::uint8_t>(byte_dist(rng)));
      }
    } while (!allow_planted && contains_planted(m));
    return m;
  };

  std::vector<opgram::AppRecord> corpus;
  for (std::size_t i = 0; i < spec.benign_apps; ++i) {
    opgram::AppRecord app;
    app.id = "benign" + std::to_string(i);
    app.label = opgram::Label::Benign;
    for (std::size_t j = 0; j < spec.methods_per_app; ++j) {
      app.methods.push_back(random_method(false));
    }
    corpus.push_back(std::move(app));
  }
  for (std::size_t i = 0; i < spec.malware_apps; ++i) {
    opgram::AppRecord app;
    app.id = "malware" + std::to_string(i);
    app.label = opgram::Label::Malware;
    if (spec.families > 0) {
      app.family = "fam" + std::to_string(i % spec.families);
    }
    for (std::size_t j = 0; j < spec.methods_per_app; ++j) {
      app.methods.push_back(random_method(true));
    }
    // One carrier method per planted sequence guarantees presence.
    for (const auto& p : spec.planted) {
      opgram::MethodSequence m = random_method(true);
      m.insert(m.end(), p.begin(), p.end());
      app.methods.push_back(std::move(m));
    }
    corpus.push_back(std::move(app));
  }
  return corpus;
}

// Writes each app as an .ops file plus a JSONL manifest; returns the
// manifest path.
inline std::filesystem::path write_ops_corpus(const std::filesystem::path& dir,
                                              const std::vector<opgram::AppRecord>& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const char* hex = "0123456789abcdef";

  std::ofstream manifest(dir / "manifest.jsonl");
  for (const auto& app : corpus) {
    std::string file = app.id + ".ops";
    std::ofstream ops(dir / file);
    for (const auto& m : app.methods) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0) ops << ' ';
        ops << hex[m[i] >> 4] << hex[m[i] & 0x0F];
      }
      ops << '\n';
    }
    manifest << "{\"id\": \"" << app.id << "\", \"label\": \"" << opgram::to_string(app.label)
             << "\"";
    if (app.family) manifest << ", \"family\": \"" << *app.family << "\"";
    manifest << ", \"path\": \"" << file << "\"}\n";
  }
  return dir / "manifest.jsonl";
}

inline opgram::AppRecord app_of(std::string id, opgram::Label label,
                                std::vector<opgram::MethodSequence> methods,
                                std::optional<std::string> family = std::nullopt) {
  opgram::AppRecord app;
  app.id = std::move(id);
  app.label = label;
  app.family = std::move(family);
  app.methods = std::move(methods);
  return app;
}

}  // namespace fixtures
