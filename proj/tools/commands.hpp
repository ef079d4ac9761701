#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ordreg::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 1;

// Flag values that parse but make no sense (bad enum names, empty grids,
// non-positive sizes). Mapped to the usage exit code.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    std::string x_path;
    std::string y_path;
    std::string out_dir;
    double lambda = 0.0;
    int restarts = 10;
    int max_sweeps = 100;
    std::uint64_t seed = kDefaultSeed;
};

struct PredictOptions {
    std::string b_path;
    std::string x_path;
    std::string out_dir;
    std::string emit = "scores"; // "scores" or "ranks"
};

struct EvaluateOptions {
    std::string pred_path;
    std::string truth_path;
    bool verbose = false;
};

struct SimulateOptions {
    std::string n_grid = "8,16,32,64,128,256,512,1024,2048,4096";
    std::int64_t p = 5;
    std::int64_t q = 5;
    std::string noise = "E1";
    std::string utility = "U1";
    double density = 0.75;
    double lambda = 0.0;
    double noise_ratio = 0.2;
    int runs = 10;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir;
};

struct RatingsOptions {
    std::string input_path;
    std::string out_dir;
    std::string mode; // "to-ratings" or "to-ranks"
};

struct CvOptions {
    std::string x_path;
    std::string y_path;
    std::string grid = "0,5";
    int folds = 5;
    std::uint64_t seed = kDefaultSeed;
};

struct ReplayOptions {
    std::string manifest_path;
    std::string out_dir; // empty: reuse the recorded output directory
};

// Each command returns the process exit code (0 on success) or throws;
// main() maps exceptions to the documented nonzero codes.
int cmd_fit(const FitOptions& options);
int cmd_predict(const PredictOptions& options);
int cmd_evaluate(const EvaluateOptions& options);
int cmd_simulate(const SimulateOptions& options);
int cmd_ratings(const RatingsOptions& options);
int cmd_cv(const CvOptions& options);
int cmd_replay(const ReplayOptions& options);

} // namespace ordreg::cli
