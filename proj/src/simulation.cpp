#include "rplm/simulation.hpp"

#include "rplm/csv_io.hpp"
#include "rplm/errors.hpp"
#include "rplm/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rplm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) {
        a += kTwoPi;
    }
    return a >= kTwoPi ? 0.0 : a;
}

}  // namespace

void SimDesign::validate() const {
    if (n < 10) {
        throw ContractViolation("simulation designs need n >= 10");
    }
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) {
        throw ContractViolation("noise standard deviation must be positive");
    }
    if (!std::isfinite(beta_true)) {
        throw ContractViolation("true beta must be finite");
    }
}

DesignKind parse_design(const std::string& name) {
    if (name == "sphere") {
        return DesignKind::Sphere;
    }
    if (name == "cylinder") {
        return DesignKind::Cylinder;
    }
    throw ContractViolation("unknown design '" + name + "' (expected sphere or cylinder)");
}

std::string design_name(DesignKind kind) { return kind == DesignKind::Sphere ? "sphere" : "cylinder"; }

double sample_von_mises(double mean, double kappa, Rng& rng) {
    if (!(kappa >= 0.0)) {
        throw ContractViolation("von Mises concentration must be nonnegative");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (kappa < 1e-8) {
        return wrap(kTwoPi * unit(rng));
    }
    if (kappa > 1e5) {
        // wrapped normal; the rejection envelope loses precision here
        std::normal_distribution<double> normal(0.0, 1.0);
        return wrap(mean + normal(rng) / std::sqrt(kappa));
    }

    double s = 0.0;
    if (kappa < 1e-5) {
        s = 1.0 / kappa + kappa;
    } else {
        double r = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        double rho = (r - std::sqrt(2.0 * r)) / (2.0 * kappa);
        s = (1.0 + rho * rho) / (2.0 * rho);
    }

    double w = 0.0;
    while (true) {
        double z = std::cos(kPi * unit(rng));
        w = (1.0 + s * z) / (s + z);
        double y = kappa * (s - w);
        double v = unit(rng);
        if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) {
            break;
        }
    }
    double angle = std::acos(std::clamp(w, -1.0, 1.0));
    if (unit(rng) < 0.5) {
        angle = -angle;
    }
    return wrap(mean + angle);
}

SimulatedSample gen_sphere_dataset(const SimDesign& design, Rng& rng) {
    design.validate();
    if (design.kind != DesignKind::Sphere) {
        throw ContractViolation("gen_sphere_dataset called with a cylinder design");
    }
    const auto n = static_cast<Eigen::Index>(design.n);
    auto m = ManifoldSpec::sphere();
    std::normal_distribution<double> noise(0.0, design.noise_sd);

    Eigen::VectorXd y(n), g(n);
    Eigen::MatrixXd x(n, 1);
    std::vector<ManifoldPoint> t;
    t.reserve(design.n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double a = sample_von_mises(0.0, 3.0, rng);
        double b = sample_von_mises(kPi, 5.0, rng);
        double eps = noise(rng);
        double eta = noise(rng);
        auto point = validate_point(m, {std::cos(a) * std::cos(b), std::sin(a) * std::cos(b), std::sin(b)});
        double lin = point[0] + 2.0 * point[1] + point[2];
        g(i) = std::exp(-lin * lin);
        x(i, 0) = point[0] + point[1] + point[2] + eta;
        y(i) = design.beta_true * x(i, 0) + g(i) + eps;
        t.push_back(std::move(point));
    }
    return {Dataset(m, std::move(y), std::move(x), std::move(t)), std::move(g)};
}

SimulatedSample gen_cylinder_dataset(const SimDesign& design, Rng& rng) {
    design.validate();
    if (design.kind != DesignKind::Cylinder) {
        throw ContractViolation("gen_cylinder_dataset called with a sphere design");
    }
    const auto n = static_cast<Eigen::Index>(design.n);
    auto m = ManifoldSpec::cylinder(-2.0, 2.0);
    std::normal_distribution<double> noise(0.0, design.noise_sd);
    std::uniform_real_distribution<double> height(-2.0, 2.0);

    Eigen::VectorXd y(n), g(n);
    Eigen::MatrixXd x(n, 1);
    std::vector<ManifoldPoint> t;
    t.reserve(design.n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double a = sample_von_mises(kPi, 3.0, rng);
        double s = height(rng);
        double eps = noise(rng);
        double eta = noise(rng);
        auto point = validate_point(m, {a, s});
        g(i) = s * s + std::sin(point[0]);
        x(i, 0) = std::exp(point[0]) + eta;
        y(i) = design.beta_true * x(i, 0) + g(i) + eps;
        t.push_back(std::move(point));
    }
    return {Dataset(m, std::move(y), std::move(x), std::move(t)), std::move(g)};
}

SimulatedSample generate(const SimDesign& design, Rng& rng) {
    return design.kind == DesignKind::Sphere ? gen_sphere_dataset(design, rng) : gen_cylinder_dataset(design, rng);
}

Rng replication_rng(std::uint64_t seed, std::size_t replication) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                      0x706c6d5fu};
    return Rng(seq);
}

BandwidthGrid design_grid(DesignKind kind) {
    auto m = kind == DesignKind::Sphere ? ManifoldSpec::sphere() : ManifoldSpec::cylinder(-2.0, 2.0);
    return BandwidthGrid(log_spaced(0.05, 0.9 * kPi, 30), m);
}

Replication run_replication(const SimDesign& design, std::size_t index, const BandwidthGrid& grid) {
    Replication rep;
    rep.index = index;
    auto rng = replication_rng(design.seed, index);
    auto sample = generate(design, rng);
    const auto& data = sample.data;
    try {
        auto table = DistanceTable::pairwise(data.manifold(), data.t());
        auto selection = select_cv(data, table, grid);
        SmootherConfig cfg(data.manifold(), selection.best_h);
        auto fit = fit_beta(data, cfg, table);
        Eigen::VectorXd beta0 = Eigen::VectorXd::Constant(1, design.beta_true);
        rep.beta_hat = fit.beta_hat(0);
        rep.standard_error = fit.standard_errors()(0);
        rep.bandwidth = selection.best_h;
        rep.mse_g = (fit.g_at_sample() - sample.g_true).squaredNorm() / static_cast<double>(data.n());
        rep.wald = wald_test(fit, beta0, data.n()).statistic;
        rep.ok = true;
    } catch (const NoFeasibleBandwidth& e) {
        rep.failure = e.what();
    } catch (const CollinearDesign& e) {
        rep.failure = e.what();
    } catch (const SingularMatrix& e) {
        rep.failure = e.what();
    } catch (const FitUndefined& e) {
        rep.failure = e.what();
    }
    return rep;
}

McSummary summarize(std::span<const Replication> replications, double beta_true) {
    std::vector<const Replication*> ok;
    std::size_t failed = 0;
    for (const auto& r : replications) {
        if (r.ok) {
            ok.push_back(&r);
        } else {
            ++failed;
        }
    }
    std::sort(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->index < b->index; });

    McSummary s;
    s.reps = ok.size();
    s.failed = failed;
    s.beta_true = beta_true;
    if (ok.size() < 2) {
        throw UnstableDesign("fewer than two successful replications");
    }
    const double count = static_cast<double>(ok.size());
    double sum_beta = 0.0, sum_g = 0.0;
    for (auto* r : ok) {
        sum_beta += r->beta_hat;
        sum_g += r->mse_g;
    }
    s.mean_beta = sum_beta / count;
    s.mean_mse_g = sum_g / count;
    double ss = 0.0, se = 0.0;
    for (auto* r : ok) {
        ss += (r->beta_hat - s.mean_beta) * (r->beta_hat - s.mean_beta);
        se += (r->beta_hat - beta_true) * (r->beta_hat - beta_true);
    }
    s.sd_beta = std::sqrt(ss / (count - 1.0));
    s.mse_beta = se / count;
    return s;
}

McResult run_monte_carlo(const SimDesign& design, std::size_t reps, const BandwidthGrid& grid, unsigned threads) {
    design.validate();
    if (reps < 2) {
        throw ContractViolation("Monte Carlo needs at least two replications");
    }
    McResult out;
    out.replications.resize(reps);
    parallel_for(reps, threads, [&](std::size_t r) { out.replications[r] = run_replication(design, r, grid); });

    auto failed = static_cast<std::size_t>(
        std::count_if(out.replications.begin(), out.replications.end(), [](const auto& r) { return !r.ok; }));
    if (static_cast<double>(failed) > 0.05 * static_cast<double>(reps)) {
        throw UnstableDesign(std::to_string(failed) + " of " + std::to_string(reps) +
                             " replications failed (limit 5%)");
    }
    out.summary = summarize(out.replications, design.beta_true);
    return out;
}

McSummary monte_carlo(const SimDesign& design, std::size_t reps, const BandwidthGrid& grid, unsigned threads) {
    return run_monte_carlo(design, reps, grid, threads).summary;
}

std::string summary_json(const McSummary& summary, const SimDesign& design) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["design"] = design_name(design.kind);
    j["n"] = design.n;
    j["seed"] = design.seed;
    j["noise_sd"] = design.noise_sd;
    j["beta_true"] = summary.beta_true;
    j["reps"] = summary.reps;
    j["failed"] = summary.failed;
    j["mean_beta"] = summary.mean_beta;
    j["sd_beta"] = summary.sd_beta;
    j["mse_beta"] = summary.mse_beta;
    j["mean_mse_g"] = summary.mean_mse_g;
    return j.dump(2) + "\n";
}

std::string summary_table_csv(const McSummary& summary, const SimDesign& design) {
    std::ostringstream os;
    os << "design,mean_beta,sd_beta,mse_beta,mean_mse_g\n";
    os << design_name(design.kind) << ',' << format_double(summary.mean_beta) << ','
       << format_double(summary.sd_beta) << ',' << format_double(summary.mse_beta) << ','
       << format_double(summary.mean_mse_g) << '\n';
    return os.str();
}

}  // namespace rplm
