#include "rplm/cli.hpp"

#include "rplm/bandwidth.hpp"
#include "rplm/csv_io.hpp"
#include "rplm/errors.hpp"
#include "rplm/plm.hpp"
#include "rplm/simulation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rplm::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
    if (dynamic_cast<const InvalidPoint*>(&e)) return "invalid_point";
    if (dynamic_cast<const OutsideInjectivityDomain*>(&e)) return "outside_injectivity_domain";
    if (dynamic_cast<const EmptyNeighborhood*>(&e)) return "empty_neighborhood";
    if (dynamic_cast<const FitUndefined*>(&e)) return "fit_undefined";
    if (dynamic_cast<const CollinearDesign*>(&e)) return "collinear_design";
    if (dynamic_cast<const SingularMatrix*>(&e)) return "singular_matrix";
    if (dynamic_cast<const NoFeasibleBandwidth*>(&e)) return "no_feasible_bandwidth";
    if (dynamic_cast<const UnstableDesign*>(&e)) return "unstable_design";
    if (dynamic_cast<const ContractViolation*>(&e)) return "invalid_argument";
    if (dynamic_cast<const Error*>(&e)) return "error";
    return "internal_error";
}

int report_failure(const std::exception& e, std::ostream& err) {
    Json j;
    j["schema"] = 1;
    j["error"] = {{"type", error_type(e)}, {"message", e.what()}};
    err << j.dump() << '\n';
    return 1;
}

/// Runs `body`, turning any exception into a structured error and exit status 1.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return report_failure(e, err);
    }
}

void write_output(const std::filesystem::path& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        out.flush();
        if (!out) {
            throw Error("failed to write to standard output");
        }
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error("cannot open output file " + path.string());
    }
    file << content;
    file.close();
    if (!file) {
        throw Error("failed to write output file " + path.string());
    }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json scores_json(const SelectionResult& selection) {
    Json arr = Json::array();
    for (const auto& c : selection.scores) {
        arr.push_back({{"h", c.h}, {"score", number_or_null(c.score)}, {"feasible", c.feasible}});
    }
    return arr;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        rows.push_back(vector_json(m.row(r).transpose()));
    }
    return rows;
}

BandwidthGrid grid_for(const RunConfig& cfg, const Dataset& data) {
    if (cfg.grid) {
        return BandwidthGrid::clipped(linear_spaced(cfg.grid->lo, cfg.grid->hi, cfg.grid->count), data.manifold());
    }
    return default_grid(data);
}

struct ChosenBandwidth {
    double h = 0.0;
    std::optional<SelectionResult> selection;
};

ChosenBandwidth choose_bandwidth(const RunConfig& cfg, const Dataset& data, const DistanceTable& table) {
    if (cfg.bandwidth) {
        return {*cfg.bandwidth, std::nullopt};
    }
    auto selection = select_cv(data, table, grid_for(cfg, data), KernelSpec{}, cfg.threads);
    return {selection.best_h, std::move(selection)};
}

std::string points_header(const ManifoldSpec& m) {
    std::string header;
    for (std::size_t c = 1; c <= m.coordinate_count(); ++c) {
        header += (c > 1 ? ",t" : "t") + std::to_string(c);
    }
    return header;
}

std::string point_cells(const ManifoldPoint& p) {
    std::string s;
    for (std::size_t c = 0; c < p.size(); ++c) {
        s += (c ? "," : "") + format_double(p[c]);
    }
    return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open input file " + path.string());
    }
    return in;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
    auto cells = split_csv_line([&] {
        std::string s = text;
        std::replace(s.begin(), s.end(), ':', ',');
        return s;
    }());
    if (cells.size() != 3) {
        throw ContractViolation("grid must be lo:hi:count, got '" + text + "'");
    }
    GridSpec g;
    try {
        g.lo = parse_cell(cells[0], 0, 1);
        g.hi = parse_cell(cells[1], 0, 2);
        double count = parse_cell(cells[2], 0, 3);
        if (count < 1 || count != std::floor(count)) {
            throw ContractViolation("grid count must be a positive integer");
        }
        g.count = static_cast<std::size_t>(count);
    } catch (const ParseError&) {
        throw ContractViolation("grid must be lo:hi:count, got '" + text + "'");
    }
    if (!(g.lo > 0.0) || !(g.hi >= g.lo) || (g.count > 1 && !(g.hi > g.lo))) {
        throw ContractViolation("grid needs 0 < lo < hi");
    }
    return g;
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::size_t k = 0;
    for (const auto& cell : split_csv_line(text)) {
        try {
            out.push_back(parse_cell(cell, 0, ++k));
        } catch (const ParseError&) {
            throw ContractViolation("malformed number list '" + text + "'");
        }
    }
    return out;
}

void RunConfig::validate() const {
    switch (command) {
    case Command::Fit:
    case Command::Select:
    case Command::Predict:
    case Command::Compare:
        if (input.empty()) {
            throw ContractViolation("this command requires --input");
        }
        if (!manifold) {
            throw ContractViolation("this command requires --manifold");
        }
        break;
    case Command::Simulate:
        if (design.empty()) {
            throw ContractViolation("simulate requires --design");
        }
        parse_design(design);
        if (reps < 2) {
            throw ContractViolation("simulate requires --reps >= 2");
        }
        break;
    }
    if (command == Command::Predict && query.empty()) {
        throw ContractViolation("predict requires --query");
    }
    if (command == Command::Select && method != "cv" && method != "sv") {
        throw ContractViolation("--method must be cv or sv");
    }
    if (!g_output.empty() && query.empty()) {
        throw ContractViolation("--g-output requires --query");
    }
    if (bandwidth && grid) {
        throw ContractViolation("--bandwidth and --grid are mutually exclusive");
    }
}

int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        auto data = ingest_csv(cfg.input, *cfg.manifold, cfg.p);
        auto table = DistanceTable::pairwise(data.manifold(), data.t());
        auto chosen = choose_bandwidth(cfg, data, table);
        SmootherConfig smoother(data.manifold(), chosen.h);
        auto fit = fit_beta(data, smoother, table);

        Json j;
        j["schema"] = 1;
        j["command"] = "fit";
        j["manifold"] = data.manifold().describe();
        j["n"] = data.n();
        j["p"] = data.p();
        j["bandwidth"] = chosen.h;
        j["bandwidth_selection"] = chosen.selection ? "cv" : "fixed";
        j["beta_hat"] = vector_json(fit.beta_hat);
        j["standard_errors"] = vector_json(fit.standard_errors());
        j["sigma2_eps_hat"] = fit.sigma2_eps_hat;
        j["sigma_hat"] = matrix_json(fit.sigma_hat);
        Eigen::VectorXd g = fit.g_at_sample();
        j["g_hat_mean"] = g.mean();
        j["g_hat_sd"] = std::sqrt((g.array() - g.mean()).square().sum() / static_cast<double>(g.size() - 1));
        if (!cfg.beta0.empty()) {
            Eigen::VectorXd beta0 = Eigen::Map<const Eigen::VectorXd>(cfg.beta0.data(),
                                                                      static_cast<Eigen::Index>(cfg.beta0.size()));
            auto wald = wald_test(fit, beta0, data.n());
            j["wald"] = {{"beta0", cfg.beta0},
                         {"statistic", wald.statistic},
                         {"dof", wald.dof},
                         {"p_value", wald.p_value}};
        }
        if (chosen.selection) {
            j["cv_scores"] = scores_json(*chosen.selection);
        }

        std::string g_csv;
        if (!cfg.query.empty()) {
            auto in = open_input(cfg.query);
            auto queries = read_points(in, data.manifold());
            Eigen::VectorXd g_query = estimate_g(fit, data, smoother, queries);
            std::ostringstream os;
            os << points_header(data.manifold()) << ",g_hat\n";
            for (std::size_t q = 0; q < queries.size(); ++q) {
                os << point_cells(queries[q]) << ',' << format_double(g_query(static_cast<Eigen::Index>(q))) << '\n';
            }
            g_csv = os.str();
            j["queries"] = queries.size();
        }

        if (!cfg.g_output.empty()) {
            write_output(cfg.g_output, g_csv, out);
        }
        write_output(cfg.output, j.dump(2) + "\n", out);
        return 0;
    });
}

int run_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        auto data = ingest_csv(cfg.input, *cfg.manifold, cfg.p);
        Json j;
        j["schema"] = 1;
        j["command"] = "select";
        j["method"] = cfg.method;
        j["manifold"] = data.manifold().describe();
        j["n"] = data.n();
        SelectionResult selection;
        if (cfg.method == "cv") {
            selection = select_cv(data, grid_for(cfg, data), KernelSpec{}, cfg.threads);
        } else {
            std::vector<std::size_t> odd, even;
            for (std::size_t i = 0; i < data.n(); ++i) {
                // 1-based odd rows train, even rows validate
                (i % 2 == 0 ? odd : even).push_back(i);
            }
            if (even.empty()) {
                throw ContractViolation("split-sample selection needs at least two rows");
            }
            auto train = data.subset(odd);
            auto validate = data.subset(even);
            selection = select_sv(train, validate, grid_for(cfg, train), KernelSpec{}, cfg.threads);
        }
        j["best_h"] = selection.best_h;
        j["scores"] = scores_json(selection);
        write_output(cfg.output, j.dump(2) + "\n", out);
        return 0;
    });
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        SimDesign design;
        design.kind = parse_design(cfg.design);
        design.n = cfg.n;
        design.beta_true = cfg.beta_true;
        design.noise_sd = cfg.noise_sd;
        design.seed = cfg.seed;
        design.validate();
        auto manifold = design.kind == DesignKind::Sphere ? ManifoldSpec::sphere() : ManifoldSpec::cylinder(-2.0, 2.0);
        auto grid = cfg.grid ? BandwidthGrid::clipped(linear_spaced(cfg.grid->lo, cfg.grid->hi, cfg.grid->count), manifold)
                             : design_grid(design.kind);
        auto summary = monte_carlo(design, cfg.reps, grid, cfg.threads);

        auto table_path = cfg.table_output;
        if (table_path.empty() && !cfg.output.empty()) {
            table_path = cfg.output;
            table_path.replace_extension(".csv");
        }
        if (!table_path.empty()) {
            write_output(table_path, summary_table_csv(summary, design), out);
        }
        write_output(cfg.output, summary_json(summary, design), out);
        return 0;
    });
}

int run_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        auto data = ingest_csv(cfg.input, *cfg.manifold, cfg.p);
        auto table = DistanceTable::pairwise(data.manifold(), data.t());
        auto chosen = choose_bandwidth(cfg, data, table);
        SmootherConfig smoother(data.manifold(), chosen.h);
        auto fit = fit_beta(data, smoother, table);

        // query rows: x_1..x_p then manifold coordinates
        auto in = open_input(cfg.query);
        std::string line;
        if (!std::getline(in, line)) {
            throw ParseError("missing header row", 0);
        }
        const std::size_t p = data.p();
        const std::size_t coords = data.manifold().coordinate_count();
        std::vector<Eigen::VectorXd> xs;
        std::vector<ManifoldPoint> points;
        std::vector<double> raw(coords);
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            ++row;
            auto cells = split_csv_line(line);
            if (cells.size() != p + coords) {
                throw ParseError("expected " + std::to_string(p + coords) + " columns, found " +
                                     std::to_string(cells.size()),
                                 row);
            }
            Eigen::VectorXd x(static_cast<Eigen::Index>(p));
            for (std::size_t j = 0; j < p; ++j) {
                x(static_cast<Eigen::Index>(j)) = parse_cell(cells[j], row, j + 1);
            }
            for (std::size_t c = 0; c < coords; ++c) {
                raw[c] = parse_cell(cells[p + c], row, p + c + 1);
            }
            try {
                points.push_back(validate_point(data.manifold(), raw));
            } catch (const InvalidPoint& e) {
                throw ParseError(e.what(), row);
            }
            xs.push_back(std::move(x));
        }
        Eigen::VectorXd g = estimate_g(fit, data, smoother, points);

        std::ostringstream os;
        for (std::size_t j = 1; j <= p; ++j) {
            os << 'x' << j << ',';
        }
        os << points_header(data.manifold()) << ",g_hat,y_hat\n";
        for (std::size_t q = 0; q < points.size(); ++q) {
            for (Eigen::Index j = 0; j < xs[q].size(); ++j) {
                os << format_double(xs[q](j)) << ',';
            }
            double gq = g(static_cast<Eigen::Index>(q));
            os << point_cells(points[q]) << ',' << format_double(gq) << ','
               << format_double(xs[q].dot(fit.beta_hat) + gq) << '\n';
        }
        write_output(cfg.output, os.str(), out);
        return 0;
    });
}

int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        auto data = ingest_csv(cfg.input, *cfg.manifold, cfg.p);
        if (data.p() < 2) {
            throw ContractViolation("compare needs at least two linear covariates for the nonparametric competitor");
        }
        std::vector<std::size_t> odd, even;
        for (std::size_t i = 0; i < data.n(); ++i) {
            (i % 2 == 0 ? odd : even).push_back(i);
        }
        if (even.empty()) {
            throw ContractViolation("compare needs at least two rows");
        }
        auto train = data.subset(odd);
        auto validate = data.subset(even);
        GridSpec spec = cfg.grid.value_or(GridSpec{0.1, 10.0, 100});
        auto hs = linear_spaced(spec.lo, spec.hi, spec.count);

        Eigen::MatrixXd train_pred = train.x().leftCols(2);
        Eigen::MatrixXd validate_pred = validate.x().leftCols(2);
        const double inj = injectivity_radius(data.manifold());

        std::ostringstream os;
        os << "h,sv,ep\n";
        bool any_sv = false, any_ep = false;
        for (double h : hs) {
            std::optional<double> sv;
            if (h < inj) {
                sv = sv_score(train, validate, h);
            }
            auto ep = prediction_error_ep(train.y(), train_pred, validate.y(), validate_pred, h);
            any_sv = any_sv || sv.has_value();
            any_ep = any_ep || ep.has_value();
            os << format_double(h) << ',' << (sv ? format_double(*sv) : "") << ','
               << (ep ? format_double(*ep) : "") << '\n';
        }
        if (!any_sv && !any_ep) {
            throw NoFeasibleBandwidth("both models are infeasible at every bandwidth in the grid");
        }
        if (!any_sv) {
            err << "warning: partially linear model infeasible at every bandwidth\n";
        }
        if (!any_ep) {
            err << "warning: nonparametric model infeasible at every bandwidth\n";
        }
        write_output(cfg.output, os.str(), out);
        return 0;
    });
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
    case Command::Fit: return run_fit(cfg, out, err);
    case Command::Select: return run_select(cfg, out, err);
    case Command::Simulate: return run_simulate(cfg, out, err);
    case Command::Predict: return run_predict(cfg, out, err);
    case Command::Compare: return run_compare(cfg, out, err);
    }
    return 1;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partially linear regression with a covariate on a Riemannian manifold.\n\n"
                 "Input CSV: a header row, then one row per observation with columns\n"
                 "  y, x_1..x_p, manifold coordinates\n"
                 "where the coordinates are d reals (euclidean:d), a unit vector in R^3\n"
                 "(sphere) or angle-in-radians,height (cylinder:min:max)."};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string manifold, grid, beta0, input, output, table_output, query, g_output;
    double bandwidth = 0.0;

    auto add_data_flags = [&](CLI::App* sub) {
        sub->add_option("--manifold", manifold, "euclidean:d | sphere | cylinder:min:max")->required();
        sub->add_option("--input", input, "input CSV")->required();
        sub->add_option("--p", cfg.p, "number of linear covariates (default: inferred from the header)");
    };
    auto add_bandwidth_flags = [&](CLI::App* sub) {
        auto* bw = sub->add_option("--bandwidth", bandwidth, "fixed bandwidth h");
        sub->add_option("--grid", grid, "candidate bandwidths lo:hi:count (equispaced)")->excludes(bw);
    };

    auto* fit = app.add_subcommand("fit", "fit the partially linear model");
    add_data_flags(fit);
    add_bandwidth_flags(fit);
    fit->add_option("--beta0", beta0, "Wald test null value v1,..,vp");
    fit->add_option("--query", query, "CSV of manifold points at which to evaluate g-hat");
    fit->add_option("--g-output", g_output, "CSV destination for g-hat at the query points");
    fit->add_option("--output", output, "JSON report (default: stdout)");

    auto* select = app.add_subcommand("select", "choose a bandwidth by cross-validation or split sample");
    add_data_flags(select);
    select->add_option("--grid", grid, "candidate bandwidths lo:hi:count (equispaced)");
    select->add_option("--method", cfg.method, "cv (leave-one-out) or sv (odd rows train, even rows validate)")
        ->check(CLI::IsMember({"cv", "sv"}));
    select->add_option("--output", output, "JSON report (default: stdout)");

    auto* simulate = app.add_subcommand("simulate", "run the sphere or cylinder Monte Carlo study");
    simulate->add_option("--design", cfg.design, "sphere | cylinder")->required()->check(CLI::IsMember({"sphere", "cylinder"}));
    simulate->add_option("--reps", cfg.reps, "replications (>= 2)");
    simulate->add_option("--n", cfg.n, "sample size per replication");
    simulate->add_option("--seed", cfg.seed, "master seed");
    simulate->add_option("--beta", cfg.beta_true, "true regression parameter");
    simulate->add_option("--noise-sd", cfg.noise_sd, "standard deviation of both error terms");
    simulate->add_option("--grid", grid, "candidate bandwidths lo:hi:count (equispaced)");
    simulate->add_option("--output", output, "JSON summary (default: stdout)");
    simulate->add_option("--table-output", table_output, "CSV summary row (default: --output with .csv)");

    auto* predict = app.add_subcommand("predict", "predict responses at new (x, t) rows");
    add_data_flags(predict);
    add_bandwidth_flags(predict);
    predict->add_option("--query", query, "CSV with columns x_1..x_p and manifold coordinates")->required();
    predict->add_option("--output", output, "CSV destination (default: stdout)");

    auto* compare = app.add_subcommand("compare", "split-sample curves for the partially linear and nonparametric models");
    add_data_flags(compare);
    compare->add_option("--grid", grid, "bandwidths lo:hi:count (default 0.1:10:100)");
    compare->add_option("--output", output, "CSV destination (default: stdout)");

    for (auto* sub : {fit, select, simulate, predict, compare}) {
        sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    return guarded(err, [&] {
        if (fit->parsed()) cfg.command = Command::Fit;
        if (select->parsed()) cfg.command = Command::Select;
        if (simulate->parsed()) cfg.command = Command::Simulate;
        if (predict->parsed()) cfg.command = Command::Predict;
        if (compare->parsed()) cfg.command = Command::Compare;
        if (!manifold.empty()) cfg.manifold = ManifoldSpec::parse(manifold);
        if (!grid.empty()) cfg.grid = parse_grid(grid);
        if (!beta0.empty()) cfg.beta0 = parse_vector(beta0);
        if (app.get_subcommand(fit)->count("--bandwidth") > 0 || app.get_subcommand(predict)->count("--bandwidth") > 0) {
            cfg.bandwidth = bandwidth;
        }
        cfg.input = input;
        cfg.output = output;
        cfg.table_output = table_output;
        cfg.query = query;
        cfg.g_output = g_output;
        return run(cfg, out, err);
    });
}

}  // namespace rplm::cli
