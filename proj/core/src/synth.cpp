#include "ordreg/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <string>

#include "ordreg/rng.hpp"

namespace ordreg::synth {

namespace {

constexpr double kAutoCorrelation = 0.7;
constexpr int kMaxGenerationAttempts = 100;

double median_of(std::vector<double> values) {
    const std::size_t m = values.size();
    std::sort(values.begin(), values.end());
    if (m % 2 == 1) {
        return values[m / 2];
    }
    return (values[m / 2 - 1] + values[m / 2]) / 2.0;
}

std::optional<double> median_of_defined(
    const std::vector<std::optional<double>>& values) {
    std::vector<double> defined;
    defined.reserve(values.size());
    for (const auto& v : values) {
        if (v.has_value()) {
            defined.push_back(*v);
        }
    }
    if (defined.empty()) {
        return std::nullopt;
    }
    return median_of(std::move(defined));
}

} // namespace

const char* to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::E1: return "E1";
    case NoiseKind::E2: return "E2";
    case NoiseKind::E3: return "E3";
    }
    return "E?";
}

const char* to_string(UtilityKind kind) {
    switch (kind) {
    case UtilityKind::U1: return "U1";
    case UtilityKind::U2: return "U2";
    case UtilityKind::U3: return "U3";
    }
    return "U?";
}

std::optional<NoiseKind> parse_noise(std::string_view name) {
    if (name == "E1") return NoiseKind::E1;
    if (name == "E2") return NoiseKind::E2;
    if (name == "E3") return NoiseKind::E3;
    return std::nullopt;
}

std::optional<UtilityKind> parse_utility(std::string_view name) {
    if (name == "U1") return UtilityKind::U1;
    if (name == "U2") return UtilityKind::U2;
    if (name == "U3") return UtilityKind::U3;
    return std::nullopt;
}

Matrix gen_predictors(Index n, Index p, std::uint64_t seed) {
    if (n < 1 || p < 1) {
        throw DimensionMismatch("predictor generation needs n, p >= 1");
    }
    Eigen::MatrixXd sigma(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            sigma(i, j) = std::pow(kAutoCorrelation, std::abs(i - j));
        }
    }
    const Eigen::MatrixXd chol =
        Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

    rng::Generator gen(seed);
    Matrix x(n, p);
    Vector z(p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) {
            z(j) = gen.normal();
        }
        x.row(i) = (chol * z).transpose();
    }
    return x;
}

CoefficientMatrix gen_coefficients(Index p, Index q, double density,
                                   std::uint64_t seed) {
    if (p < 1 || q < 2) {
        throw DimensionMismatch("coefficient generation needs p >= 1, q >= 2");
    }
    if (!(density > 0.0) || !(density <= 1.0)) {
        throw Error("density must lie in (0, 1]");
    }
    const Index cells = p * q;
    const auto support = static_cast<Index>(
        std::ceil(density * static_cast<double>(cells)));
    const Index required_rank = std::min<Index>({2, p, q - 1});

    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        rng::Generator gen(rng::substream_seed(
            seed, static_cast<std::uint64_t>(attempt)));

        // Uniform support: partial Fisher-Yates over all cell indices.
        std::vector<Index> cells_order(static_cast<std::size_t>(cells));
        for (Index c = 0; c < cells; ++c) {
            cells_order[static_cast<std::size_t>(c)] = c;
        }
        for (Index i = 0; i < support; ++i) {
            const Index j =
                i + static_cast<Index>(gen.below(
                        static_cast<std::uint64_t>(cells - i)));
            std::swap(cells_order[static_cast<std::size_t>(i)],
                      cells_order[static_cast<std::size_t>(j)]);
        }
        std::sort(cells_order.begin(),
                  cells_order.begin() + static_cast<std::ptrdiff_t>(support));

        Matrix b = Matrix::Zero(p, q);
        for (Index i = 0; i < support; ++i) {
            const Index cell = cells_order[static_cast<std::size_t>(i)];
            b(cell / q, cell % q) = gen.normal();
        }

        try {
            CoefficientMatrix canonical = canonicalize(b);
            const Eigen::MatrixXd dense = canonical.B;
            if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(dense).rank() <
                required_rank) {
                continue;
            }
            return canonical;
        } catch (const DegenerateMatrix&) {
            continue;
        }
    }
    throw GenerationFailed(
        "no admissible coefficient matrix in " +
        std::to_string(kMaxGenerationAttempts) + " attempts (p=" +
        std::to_string(p) + ", q=" + std::to_string(q) +
        ", density=" + std::to_string(density) + ")");
}

Matrix gen_noise(Index n, Index q, NoiseKind kind, std::uint64_t seed) {
    if (n < 1 || q < 1) {
        throw DimensionMismatch("noise generation needs n, q >= 1");
    }
    rng::Generator gen(seed);
    Matrix e(n, q);
    const double mixture_sd = std::sqrt(0.2);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < q; ++j) {
            switch (kind) {
            case NoiseKind::E1:
                e(i, j) = gen.normal();
                break;
            case NoiseKind::E2:
                e(i, j) = gen.cauchy();
                break;
            case NoiseKind::E3: {
                const double mean = (gen.uniform01() < 0.8) ? 0.0 : 1.0;
                e(i, j) = mean + mixture_sd * gen.normal();
                break;
            }
            }
        }
    }
    return e;
}

Matrix scale_noise(const Matrix& E, const Matrix& signal, double ratio) {
    if (!(ratio > 0.0)) {
        throw Error("noise ratio must be positive");
    }
    const double e_norm = E.norm();
    const double s_norm = signal.norm();
    if (e_norm == 0.0) {
        throw ZeroNorm("noise matrix has zero Frobenius norm");
    }
    if (s_norm == 0.0) {
        throw ZeroNorm("signal matrix has zero Frobenius norm");
    }
    return E * (ratio * s_norm / e_norm);
}

Matrix apply_utility(const Matrix& M, UtilityKind kind) {
    if (!M.allFinite()) {
        throw NonFinite("utility input contains NaN or infinity");
    }
    Matrix out(M.rows(), M.cols());
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            const double x = M(i, j);
            switch (kind) {
            case UtilityKind::U1:
                out(i, j) = x;
                break;
            case UtilityKind::U2:
                out(i, j) = 1.0 / (1.0 + std::exp(-x / 5.0));
                break;
            case UtilityKind::U3:
                out(i, j) = std::floor(x);
                break;
            }
        }
    }
    return out;
}

double metric_m1(const Matrix& b_tilde, const Matrix& b_star) {
    if (b_tilde.rows() != b_star.rows() || b_tilde.cols() != b_star.cols()) {
        throw DimensionMismatch("matrices must share a shape");
    }
    return (b_tilde - b_star).squaredNorm();
}

double metric_m2(const Matrix& b_tilde, const Matrix& b_star) {
    if (b_tilde.rows() != b_star.rows() || b_tilde.cols() != b_star.cols()) {
        throw DimensionMismatch("matrices must share a shape");
    }
    if (b_tilde.maxCoeff() == b_tilde.minCoeff()) {
        throw ZeroVariance("first matrix is constant");
    }
    if (b_star.maxCoeff() == b_star.minCoeff()) {
        throw ZeroVariance("second matrix is constant");
    }
    const double mean_tilde = b_tilde.mean();
    const double mean_star = b_star.mean();
    double cross = 0.0;
    double var_tilde = 0.0;
    double var_star = 0.0;
    for (Index i = 0; i < b_tilde.rows(); ++i) {
        for (Index j = 0; j < b_tilde.cols(); ++j) {
            const double a = b_tilde(i, j) - mean_tilde;
            const double b = b_star(i, j) - mean_star;
            cross += a * b;
            var_tilde += a * a;
            var_star += b * b;
        }
    }
    return cross / std::sqrt(var_tilde * var_star);
}

SelectionMetrics selection_metrics(const Matrix& b_hat,
                                   const Matrix& b_star) {
    if (b_hat.rows() != b_star.rows() || b_hat.cols() != b_star.cols()) {
        throw DimensionMismatch("matrices must share a shape");
    }
    std::int64_t nonzero_truth = 0;
    std::int64_t sign_matches = 0;
    std::int64_t zero_truth = 0;
    std::int64_t zero_kept = 0;
    for (Index i = 0; i < b_hat.rows(); ++i) {
        for (Index j = 0; j < b_hat.cols(); ++j) {
            const double truth = b_star(i, j);
            const double est = b_hat(i, j);
            if (truth != 0.0) {
                ++nonzero_truth;
                const bool same_sign =
                    (truth > 0.0 && est > 0.0) || (truth < 0.0 && est < 0.0);
                sign_matches += same_sign ? 1 : 0;
            } else {
                ++zero_truth;
                zero_kept += (est == 0.0) ? 1 : 0;
            }
        }
    }
    SelectionMetrics out;
    if (nonzero_truth > 0) {
        out.signed_sensitivity = static_cast<double>(sign_matches) /
                                 static_cast<double>(nonzero_truth);
    }
    if (zero_truth > 0) {
        out.specificity = static_cast<double>(zero_kept) /
                          static_cast<double>(zero_truth);
    }
    return out;
}

GeneratedData gen_dataset(const ExperimentConfig& config, Index n,
                          std::uint64_t run_seed) {
    const std::uint64_t x_seed = rng::substream_seed(run_seed, 1);
    const std::uint64_t b_seed = rng::substream_seed(run_seed, 2);
    const std::uint64_t e_seed = rng::substream_seed(run_seed, 3);
    const std::uint64_t fit_seed = rng::substream_seed(run_seed, 4);

    CoefficientMatrix b_star =
        gen_coefficients(config.p, config.q, config.density, b_seed);
    Matrix x = gen_predictors(n, config.p, x_seed);
    const Matrix signal = x * b_star.B;
    const Matrix noise = scale_noise(
        gen_noise(n, config.q, config.noise, e_seed), signal,
        config.noise_ratio);
    Matrix y = apply_utility(signal + noise, config.utility);
    return GeneratedData{DataSet::create(std::move(x), std::move(y)),
                         std::move(b_star), fit_seed};
}

std::vector<ExperimentRow>
run_consistency_experiment(const ExperimentConfig& config,
                           std::span<const Index> n_grid) {
    if (config.runs < 1) {
        throw Error("experiment needs runs >= 1");
    }
    if (!(config.noise_ratio > 0.0)) {
        throw Error("noise ratio must be positive");
    }
    std::vector<Index> grid(n_grid.begin(), n_grid.end());
    if (grid.empty()) {
        grid.push_back(config.n);
    }
    for (const Index n : grid) {
        if (n < 1) {
            throw Error("grid sizes must be >= 1");
        }
    }

    const std::uint64_t master = config.fit.seed;
    const bool penalized = config.fit.lambda > 0.0;

    std::vector<ExperimentRow> table;
    table.reserve(grid.size());
    for (const Index n : grid) {
        const std::uint64_t n_seed =
            rng::substream_seed(master, static_cast<std::uint64_t>(n));
        std::vector<double> m1s;
        std::vector<double> m2s;
        std::vector<std::optional<double>> sensitivities;
        std::vector<std::optional<double>> specificities;
        m1s.reserve(static_cast<std::size_t>(config.runs));
        m2s.reserve(static_cast<std::size_t>(config.runs));

        for (int run = 0; run < config.runs; ++run) {
            const std::uint64_t run_seed = rng::substream_seed(
                n_seed, static_cast<std::uint64_t>(run));
            const std::string where = "n=" + std::to_string(n) + " run=" +
                                      std::to_string(run) + ": ";
            try {
                const GeneratedData generated =
                    gen_dataset(config, n, run_seed);
                solver::FitConfig fit_config = config.fit;
                fit_config.seed = generated.fit_seed;
                const solver::FitResult fitted =
                    solver::fit(generated.data, fit_config);
                m1s.push_back(
                    metric_m1(fitted.b_hat.B, generated.b_star.B));
                m2s.push_back(
                    metric_m2(fitted.b_hat.B, generated.b_star.B));
                if (penalized) {
                    const SelectionMetrics sel = selection_metrics(
                        fitted.b_hat.B, generated.b_star.B);
                    sensitivities.push_back(sel.signed_sensitivity);
                    specificities.push_back(sel.specificity);
                }
            } catch (const GenerationFailed& e) {
                throw GenerationFailed(where + e.what());
            } catch (const AllRestartsDegenerate& e) {
                throw AllRestartsDegenerate(where + e.what());
            }
        }

        ExperimentRow row;
        row.n = n;
        row.noise = config.noise;
        row.utility = config.utility;
        row.median_m1 = median_of(std::move(m1s));
        row.median_m2 = median_of(std::move(m2s));
        if (penalized) {
            row.median_signed_sensitivity = median_of_defined(sensitivities);
            row.median_specificity = median_of_defined(specificities);
        }
        table.push_back(std::move(row));
    }
    return table;
}

} // namespace ordreg::synth
