#include "varlex/generators.hpp"
#include "varlex/io.hpp"
#include "varlex/lebesgue.hpp"
#include "varlex/matrix_weight.hpp"
#include "varlex/operators.hpp"
#include "varlex/verify.hpp"
#include "varlex/weights.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>

using nlohmann::json;
using namespace varlex;

namespace {

json cube_to_json(const DyadicCube& cube, int dim) {
    json j{{"depth", cube.depth}, {"side", cube.side}};
    j["shift"] = dim == 1 ? json::array({cube.shift[0]})
                          : json::array({cube.shift[0], cube.shift[1]});
    j["corner"] = dim == 1 ? json::array({cube.corner[0]})
                           : json::array({cube.corner[0], cube.corner[1]});
    j["lo"] = dim == 1 ? json::array({cube.lo[0]}) : json::array({cube.lo[0], cube.lo[1]});
    return j;
}

json constant_report_to_json(const WeightConstantReport& report, int dim) {
    return json{{"constant", report.constant},
                {"argmax_cube", cube_to_json(report.argmax, dim)},
                {"n_cubes", report.cube_count}};
}

struct CubeArgs {
    int depth = 0;
    std::vector<long> corner{0};
    std::vector<double> shift;

    DyadicCube build(const DomainGrid& grid) const {
        std::array<long, 2> c{corner.at(0), corner.size() > 1 ? corner.at(1) : 0};
        std::array<double, 2> t{0.0, 0.0};
        if (!shift.empty()) {
            t[0] = shift.at(0);
            if (shift.size() > 1) t[1] = shift.at(1);
        }
        return make_dyadic_cube(grid, t, depth, c);
    }
};

int run_norm(const std::string& field_path, const std::string& exponent_path,
             const std::string& weight_path) {
    GridField f = field_from_json(load_json_file(field_path));
    ExponentField p = exponent_from_json(load_json_file(exponent_path));
    LuxemburgResult result;
    if (weight_path.empty()) {
        result = luxemburg_norm(f, p);
    } else {
        GridField w = field_from_json(load_json_file(weight_path));
        result = weighted_norm(f, p, w);
    }
    std::cout << json{{"norm", result.norm},
                      {"modular_at_norm", result.modular_at_norm},
                      {"iterations", result.iterations}}
                     .dump(2)
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"varlex: numerics for weighted variable-exponent Lebesgue spaces"};
    app.require_subcommand(1);

    // --- norm ---------------------------------------------------------------
    std::string field_path, exponent_path, weight_path;
    auto* norm_cmd = app.add_subcommand("norm", "Luxemburg norm of a field");
    norm_cmd->add_option("--field", field_path, "GridField JSON")->required();
    norm_cmd->add_option("--exponent", exponent_path, "ExponentField JSON")->required();
    norm_cmd->add_option("--weight", weight_path, "optional weight JSON");

    // --- weight-constant ----------------------------------------------------
    std::string wc_kind;
    std::vector<std::string> wc_weights, wc_exponents;
    std::string wc_q;
    double wc_p = 2.0, wc_r = 2.0, wc_alpha = 0.0;
    int wc_depth = -1;
    bool wc_shifted = false;
    auto* wc_cmd = app.add_subcommand("weight-constant", "weight class constants over cubes");
    wc_cmd->add_option("--kind", wc_kind, "ap | rh | apq | multi-apq")->required();
    wc_cmd->add_option("--weight", wc_weights, "weight JSON (repeat for multi-apq)")->required();
    wc_cmd->add_option("--exponent", wc_exponents, "exponent JSON (repeat for multi-apq)");
    wc_cmd->add_option("--q", wc_q, "target exponent JSON (apq / multi-apq)");
    wc_cmd->add_option("--p", wc_p, "constant exponent for --kind ap");
    wc_cmd->add_option("--r", wc_r, "reverse Hoelder exponent for --kind rh");
    wc_cmd->add_option("--alpha", wc_alpha, "fractional order alpha");
    wc_cmd->add_option("--depth", wc_depth, "cube family depth (default: full)");
    wc_cmd->add_flag("--shifted", wc_shifted, "include the 1/3-shifted families");

    // --- apply-op -----------------------------------------------------------
    std::string op_kind, op_out, op_sigma;
    std::vector<std::string> op_fields;
    double op_alpha = 0.0, op_delta = 1.0;
    int op_depth = -1;
    long op_budget = 1L << 24;
    CubeArgs op_cube;
    auto* op_cmd = app.add_subcommand("apply-op", "apply an operator to fields");
    op_cmd->add_option("--op", op_kind, "max | dyadic-max | sharp | avg | integral | wdm")
        ->required();
    op_cmd->add_option("--field", op_fields, "input GridField JSON (repeat for multilinear)")
        ->required();
    op_cmd->add_option("--alpha", op_alpha, "fractional order alpha");
    op_cmd->add_option("--delta", op_delta, "power for the sharp maximal function");
    op_cmd->add_option("--sigma", op_sigma, "weight JSON for --op wdm");
    op_cmd->add_option("--depth", op_depth, "cube family depth (default: full)");
    op_cmd->add_option("--budget", op_budget, "source tuple budget for --op integral");
    op_cmd->add_option("--cube-depth", op_cube.depth, "cube depth for --op avg");
    op_cmd->add_option("--cube-corner", op_cube.corner, "cube corner for --op avg");
    op_cmd->add_option("--cube-shift", op_cube.shift, "cube shift for --op avg");
    op_cmd->add_option("--out", op_out, "output JSON path (default: stdout)");

    // --- cz -------------------------------------------------------------
    std::vector<std::string> cz_fields, cz_sigmas;
    double cz_alpha = 0.0, cz_a = 0.0;
    std::string cz_dump;
    std::vector<int> cz_range;
    auto* cz_cmd = app.add_subcommand("cz", "stopping-time decomposition");
    cz_cmd->add_option("--field", cz_fields, "input field JSON (repeat per factor)")->required();
    cz_cmd->add_option("--sigma", cz_sigmas, "weight JSON (repeat per factor)")->required();
    cz_cmd->add_option("--alpha", cz_alpha, "fractional order alpha");
    cz_cmd->add_option("--a", cz_a, "level base a > 2^{mn - alpha}")->required();
    cz_cmd->add_option("--k-range", cz_range, "explicit level range: k_lo k_hi")
        ->expected(2);
    cz_cmd->add_option("--dump", cz_dump, "output JSON path")->required();

    // --- matw ---------------------------------------------------------------
    std::string mw_task, mw_matrix, mw_exponent, mw_q, mw_field, mw_out;
    double mw_alpha = 0.0;
    int mw_depth = -1, mw_directions = 0;
    CubeArgs mw_cube;
    auto* mw_cmd = app.add_subcommand("matw", "matrix weight operations");
    mw_cmd->add_option("--task", mw_task,
                       "apq-direct | apq-reduced | christ-goldberg | reduce | vector-avg")
        ->required();
    mw_cmd->add_option("--matrix", mw_matrix, "MatrixWeightField JSON")->required();
    mw_cmd->add_option("--exponent", mw_exponent, "source exponent JSON")->required();
    mw_cmd->add_option("--q", mw_q, "target exponent JSON");
    mw_cmd->add_option("--field", mw_field, "vector field JSON");
    mw_cmd->add_option("--alpha", mw_alpha, "fractional order alpha");
    mw_cmd->add_option("--depth", mw_depth, "cube family depth (default: full)");
    mw_cmd->add_option("--directions", mw_directions, "boundary sample budget");
    mw_cmd->add_option("--cube-depth", mw_cube.depth, "cube depth for reduce / vector-avg");
    mw_cmd->add_option("--cube-corner", mw_cube.corner, "cube corner");
    mw_cmd->add_option("--cube-shift", mw_cube.shift, "cube shift");
    mw_cmd->add_option("--out", mw_out, "output JSON path (default: stdout)");

    // --- verify ---------------------------------------------------------
    std::string verify_config, verify_report = "report.json", verify_csv = "report.csv";
    int verify_threads = -1;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite from a config");
    verify_cmd->add_option("--config", verify_config, "ExperimentConfig JSON")->required();
    verify_cmd->add_option("--report", verify_report, "report JSON output path");
    verify_cmd->add_option("--csv", verify_csv, "CSV summary output path");
    verify_cmd->add_option("--threads", verify_threads, "worker thread cap (0 = hardware)");

    // --- report ---------------------------------------------------------
    std::string report_input, report_csv;
    auto* report_cmd = app.add_subcommand("report", "render an existing report");
    report_cmd->add_option("--input", report_input, "report JSON")->required();
    report_cmd->add_option("--csv", report_csv, "write CSV summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*norm_cmd) return run_norm(field_path, exponent_path, weight_path);

        if (*wc_cmd) {
            GridField w0 = field_from_json(load_json_file(wc_weights.front()));
            const DomainGrid& grid = w0.grid;
            int depth = wc_depth < 0 ? grid.max_depth() : wc_depth;
            auto shifts = wc_shifted ? all_shifts(grid.dim) : zero_shift(grid.dim);
            CubeFamily family = enumerate_cubes(grid, shifts, depth);
            json out;
            if (wc_kind == "ap") {
                out = constant_report_to_json(classical_ap(w0, wc_p, family), grid.dim);
            } else if (wc_kind == "rh") {
                out = json{{"constant", reverse_holder(w0, wc_r, family)},
                           {"n_cubes", family.size()}};
            } else if (wc_kind == "apq") {
                if (wc_exponents.empty() || wc_q.empty())
                    throw std::invalid_argument("apq needs --exponent and --q");
                ExponentField p = exponent_from_json(load_json_file(wc_exponents.front()));
                ExponentField q = exponent_from_json(load_json_file(wc_q));
                out = constant_report_to_json(variable_apq(w0, p, q, wc_alpha, family),
                                              grid.dim);
            } else if (wc_kind == "multi-apq") {
                if (wc_exponents.size() != wc_weights.size() || wc_q.empty())
                    throw std::invalid_argument(
                        "multi-apq needs one --exponent per --weight plus --q");
                std::vector<GridField> ws;
                std::vector<ExponentField> ps;
                for (std::size_t i = 0; i < wc_weights.size(); ++i) {
                    ws.push_back(field_from_json(load_json_file(wc_weights[i])));
                    ps.push_back(exponent_from_json(load_json_file(wc_exponents[i])));
                }
                ExponentField q = exponent_from_json(load_json_file(wc_q));
                WeightVector wv = make_weight_vector(std::move(ws), ps, q);
                out = constant_report_to_json(
                    multi_apq_constant(wv, ps, q, wc_alpha, family), grid.dim);
            } else {
                throw std::invalid_argument("unknown --kind " + wc_kind);
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }

        if (*op_cmd) {
            std::vector<GridField> fields;
            for (const auto& path : op_fields) fields.push_back(field_from_json(load_json_file(path)));
            const DomainGrid& grid = fields.front().grid;
            int depth = op_depth < 0 ? grid.max_depth() : op_depth;
            GridField result(grid, 0.0);
            if (op_kind == "max") {
                result = fractional_maximal(fields, op_alpha, aligned_family(grid));
            } else if (op_kind == "dyadic-max") {
                result = fractional_maximal(fields, op_alpha, dyadic_family(grid, depth));
            } else if (op_kind == "sharp") {
                result = sharp_maximal(fields.front(), op_delta, dyadic_family(grid, depth));
            } else if (op_kind == "avg") {
                result = fractional_average(fields, op_alpha, op_cube.build(grid));
            } else if (op_kind == "integral") {
                result = fractional_integral(fields, op_alpha, op_budget);
            } else if (op_kind == "wdm") {
                if (op_sigma.empty()) throw std::invalid_argument("wdm needs --sigma");
                GridField sigma = field_from_json(load_json_file(op_sigma));
                result = weighted_dyadic_maximal(fields.front(), sigma,
                                                 dyadic_family(grid, depth));
            } else {
                throw std::invalid_argument("unknown --op " + op_kind);
            }
            json out{{"op", op_kind},
                     {"params", json{{"alpha", op_alpha}, {"delta", op_delta}, {"m", fields.size()}}},
                     {"result", field_to_json(result)}};
            if (op_out.empty())
                std::cout << out.dump(2) << '\n';
            else
                save_json_file(op_out, out);
            return 0;
        }

        if (*cz_cmd) {
            std::vector<GridField> fields, sigmas;
            for (const auto& path : cz_fields) fields.push_back(field_from_json(load_json_file(path)));
            for (const auto& path : cz_sigmas) sigmas.push_back(field_from_json(load_json_file(path)));
            const DomainGrid& grid = fields.front().grid;
            std::optional<std::pair<int, int>> range;
            if (cz_range.size() == 2) range = std::pair<int, int>{cz_range[0], cz_range[1]};
            CZDecomposition dec = cz_decompose(fields, sigmas, cz_alpha, cz_a,
                                               dyadic_family(grid, grid.max_depth()), range);
            json levels = json::array();
            for (const auto& level : dec.levels) {
                json cubes = json::array();
                for (const auto& stop : level.cubes)
                    cubes.push_back(json{{"cube", cube_to_json(stop.cube, grid.dim)},
                                         {"product", stop.product},
                                         {"residual_cells", stop.residual_cells}});
                levels.push_back(json{{"k", level.k}, {"cubes", cubes}});
            }
            save_json_file(cz_dump, json{{"a", dec.a},
                                         {"alpha", dec.alpha},
                                         {"m", dec.m},
                                         {"k_lo", dec.k_lo},
                                         {"k_hi", dec.k_hi},
                                         {"level_range_clamped", dec.level_range_clamped},
                                         {"levels", levels}});
            return 0;
        }

        if (*mw_cmd) {
            MatrixWeightField w = matrix_field_from_json(load_json_file(mw_matrix));
            ExponentField p = exponent_from_json(load_json_file(mw_exponent));
            const DomainGrid& grid = w.grid();
            int depth = mw_depth < 0 ? grid.max_depth() : mw_depth;
            CubeFamily family = dyadic_family(grid, depth);
            json out;
            if (mw_task == "apq-direct" || mw_task == "apq-reduced") {
                if (mw_q.empty()) throw std::invalid_argument(mw_task + " needs --q");
                ExponentField q = exponent_from_json(load_json_file(mw_q));
                WeightConstantReport report =
                    mw_task == "apq-direct"
                        ? matrix_apq_direct(w, p, q, mw_alpha, family)
                        : matrix_apq_reduced(w, p, q, mw_alpha, family, mw_directions);
                out = constant_report_to_json(report, grid.dim);
            } else if (mw_task == "christ-goldberg") {
                if (mw_field.empty()) throw std::invalid_argument("christ-goldberg needs --field");
                VectorField f = vector_field_from_json(load_json_file(mw_field));
                GridField result = christ_goldberg(f, w, mw_alpha, family);
                out = json{{"op", "christ-goldberg"}, {"result", field_to_json(result)}};
            } else if (mw_task == "reduce") {
                ReducingOperator op = reducing_operator(w, ReduceKind::Primal, p,
                                                        mw_cube.build(grid), mw_directions);
                std::vector<double> entries;
                for (int r = 0; r < w.d(); ++r)
                    for (int c = 0; c < w.d(); ++c) entries.push_back(op.matrix(r, c));
                out = json{{"cube", cube_to_json(op.cube, grid.dim)},
                           {"matrix", entries},
                           {"certified_lower", op.certified_lower},
                           {"certified_upper", op.certified_upper},
                           {"mvee_iterations", op.mvee_iterations}};
            } else if (mw_task == "vector-avg") {
                if (mw_field.empty()) throw std::invalid_argument("vector-avg needs --field");
                VectorField f = vector_field_from_json(load_json_file(mw_field));
                VectorField result = vector_average(f, mw_alpha, mw_cube.build(grid));
                out = json{{"op", "vector-avg"}, {"result", vector_field_to_json(result)}};
            } else {
                throw std::invalid_argument("unknown --task " + mw_task);
            }
            if (mw_out.empty())
                std::cout << out.dump(2) << '\n';
            else
                save_json_file(mw_out, out);
            return 0;
        }

        if (*verify_cmd) {
            VerifyOptions options;
            try {
                options = options_from_json(load_json_file(verify_config));
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return 2;
            }
            if (const char* env_seed = std::getenv("VARLEX_SEED"))
                options.seed = std::strtoull(env_seed, nullptr, 10);
            if (verify_threads >= 0) options.threads = verify_threads;
            VerificationReport report = run_verification(options);
            save_json_file(verify_report, report.to_json());
            save_text_file(verify_csv, report.to_csv());
            for (const auto& check : report.checks)
                std::cout << (check.failed() ? "[FAIL] " : (check.status == "report" ? "[INFO] "
                                                                                     : "[PASS] "))
                          << check.id << " (" << check.anchor << ")\n";
            std::cout << (report.all_passed() ? "all asserted checks passed"
                                              : "asserted checks FAILED")
                      << '\n';
            return report.all_passed() ? 0 : 1;
        }

        if (*report_cmd) {
            json j = load_json_file(report_input);
            VerificationReport report;
            report.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& entry : j.at("checks")) {
                CheckResult check;
                check.id = entry.at("id").get<std::string>();
                check.anchor = entry.at("anchor").get<std::string>();
                check.status = entry.at("status").get<std::string>();
                check.tolerance = entry.at("tolerance").get<double>();
                check.runtime_ms = entry.at("runtime_ms").get<double>();
                check.measured = entry.at("measured").get<std::map<std::string, double>>();
                report.checks.push_back(std::move(check));
            }
            if (!report_csv.empty()) save_text_file(report_csv, report.to_csv());
            std::cout << report.to_csv();
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
