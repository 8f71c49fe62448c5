#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "depo/characteristics.hpp"
#include "depo/error.hpp"

namespace depo::cli {

using Json = nlohmann::json;

inline constexpr const char* kOutDirEnv = "DEPO_OUT_DIR";

enum ExitCode : int {
  kSuccess = 0,
  kUnexpected = 1,
  kInvalidConfig = 2,
  kDomainViolation = 3,
  kNonConvergence = 4,
};

/// CflViolation lands in kInvalidConfig: adaptive stepping never violates
/// the bound, so it only arises from a user-fixed time step.
int exit_code_for(ErrorKind kind);

/// Strict reader over one JSON object. Every key read is echoed, with its
/// default filled in, into effective(); finish() rejects keys never read.
class ConfigReader {
 public:
  explicit ConfigReader(const Json& in, std::string path = "");

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> def = std::nullopt);
  long long integer(const std::string& key, std::optional<long long> def = std::nullopt);
  bool boolean(const std::string& key, std::optional<bool> def = std::nullopt);
  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt);
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> def = std::nullopt);
  PhysState state(const std::string& key, std::optional<PhysState> def = std::nullopt);

  /// Reads a nested object; the callback must consume it fully.
  template <class F>
  void object(const std::string& key, F&& read) {
    ConfigReader child(sub(key), path_ + key + ".");
    read(child);
    child.finish();
    used_.insert(key);
    eff_[key] = child.effective();
  }

  void finish() const;
  const Json& effective() const { return eff_; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

 private:
  const Json& sub(const std::string& key) const;

  Json in_;
  std::string path_;
  Json eff_ = Json::object();
  std::set<std::string> used_;
};

std::uint64_t fnv1a(const std::string& bytes);
/// %.17g, the fixed CSV number format.
std::string format_double(double v);

struct RunContext {
  std::string out_dir;
  std::uint64_t seed = 1;
  std::ostream* out = nullptr;  // human-readable report
};

// Each command validates its config, runs, writes its files under
// ctx.out_dir and returns a JSON summary (also stored in the manifest).
Json cmd_riemann(const Json& config, const RunContext& ctx, Json* effective = nullptr);
Json cmd_evolve(const Json& config, const RunContext& ctx, Json* effective = nullptr);
Json cmd_bricklayer(const Json& config, const RunContext& ctx, Json* effective = nullptr);
Json cmd_hydro_table(const Json& config, const RunContext& ctx, Json* effective = nullptr);
Json cmd_entropy_scan(const Json& config, const RunContext& ctx, Json* effective = nullptr);
Json cmd_convergence(const Json& config, const RunContext& ctx, Json* effective = nullptr);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace depo::cli
