#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sg/template.hpp"
#include "sg/vocabulary.hpp"

namespace sg {

/// Seeded generator whose draws depend only on the seed: bounded integers use rejection sampling
/// and shuffles are written out, so output does not vary with the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  int between(int lo, int hi);
  /// Uniform in [0, 1) with 53 random bits.
  double unit();
  bool chance(double p) { return unit() < p; }
  /// Index drawn proportionally to `weights`; requires a positive total.
  std::size_t weighted(const std::vector<double>& weights);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Independent sub-seed for item `index` of stream `stream`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

struct SftSample {
  std::string prompt;     // x
  std::string reasoning;  // r
  std::string code;       // s, canonical LLMSLI
  bool validated = false;
  friend bool operator==(const SftSample&, const SftSample&) = default;
};

/// Constructive sampling: objects are placed one at a time on shuffled (cell, yaw) candidates
/// that keep the scene collision-free, in bounds, and consistent with every relation rule whose
/// two sides are present. Throws TemplateExhausted when the attempt budget runs out.
SftSample sample_scene(const SceneTemplate& t, const Vocabulary& vocab, std::uint64_t seed);

/// Algorithm-1 filter plus template conformance: parses, compiles, validates, and satisfies the
/// template's room and relation rules.
bool accept_program(std::string_view code, const SceneTemplate& t, const Vocabulary& vocab);

/// Exactly n distinct validated samples. Candidate k uses derive_seed(seed, k); up to 4n
/// candidates are drawn and kept in index order, so the thread count does not change the output.
std::vector<SftSample> generate_sft_dataset(const SceneTemplate& t, const Vocabulary& vocab,
                                            std::size_t n, std::uint64_t seed,
                                            unsigned threads = 1);

struct CorpusRecord {
  std::size_t sample = 0;
  std::string field;  // "prompt", "reasoning" or "code"
  std::string text;
  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

/// Three records (x, r, s) per sample.
std::vector<CorpusRecord> extract_pretrain_corpus(const std::vector<SftSample>& samples);
/// SFT view: (x, s) only; reasoning is not a supervision target.
std::vector<std::pair<std::string, std::string>> sft_pairs(const std::vector<SftSample>& samples);

enum class ErrorType { Semantic, Spatial, Collision, Syntax };

std::string_view to_string(ErrorType t);
std::optional<ErrorType> parse_error_type(std::string_view name);

struct InjectedError {
  ErrorType type = ErrorType::Syntax;
  std::string description;
  friend bool operator==(const InjectedError&, const InjectedError&) = default;
};

struct Injection {
  std::string text;
  std::string description;
};

/// One verified edit of a program. Throws InjectionFailed when no applicable edit exists.
Injection inject_error(std::string_view code, ErrorType type, std::uint64_t seed,
                       const SceneTemplate& t, const Vocabulary& vocab);

/// Everything wrong with a program, in checking order. Parse and compile errors stop the check.
struct FailureReport {
  bool parse = false;
  bool compile = false;
  bool collision = false;
  bool validation = false;  // support or bounds
  bool semantic = false;    // object that does not belong in the template's room
  bool relation = false;    // a relation rule breach or a missing required object
  std::vector<std::string> details;

  bool any() const { return parse || compile || collision || validation || semantic || relation; }
  /// First failing stage: parse, compile, collision, validation, semantic, relation; "" if none.
  std::string primary() const;
};

FailureReport diagnose_program(std::string_view code, const SceneTemplate& t,
                               const Vocabulary& vocab);

struct ChainResult {
  std::string rejected;
  std::vector<InjectedError> errors;
  std::string failure_class;
};

/// 2-3 injections of distinct types, syntax last. The result is checked: it must fail, and every
/// injected error must be observed (syntax as a parse failure; the others on the program before
/// the syntax edit). Retries on fresh sub-seeds; throws ChainFailed after the budget.
ChainResult error_chain(std::string_view chosen, std::uint64_t seed, const SceneTemplate& t,
                        const Vocabulary& vocab);

struct DpoPair {
  std::size_t sample = 0;
  std::string prompt;
  std::string chosen;
  std::string rejected;
  std::vector<InjectedError> errors;
  std::string failure_class;
  friend bool operator==(const DpoPair&, const DpoPair&) = default;
};

struct DpoResult {
  std::vector<DpoPair> pairs;
  std::size_t failed = 0;  // samples skipped after ChainFailed
};

/// One pair per sample, chain seed derive_seed(seed, index, 1).
DpoResult generate_dpo_pairs(const std::vector<SftSample>& samples, std::uint64_t seed,
                             const SceneTemplate& t, const Vocabulary& vocab,
                             unsigned threads = 1);

/// JSONL writers (one compact canonical JSON object per line) and readers.
std::string sft_jsonl(const std::vector<SftSample>& samples, const std::string& template_name);
std::string pretrain_jsonl(const std::vector<CorpusRecord>& corpus);
std::string dpo_jsonl(const std::vector<DpoPair>& pairs);
std::vector<SftSample> read_sft_jsonl(std::string_view text);
std::vector<DpoPair> read_dpo_jsonl(std::string_view text);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace sg
