#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include <msgt/charmap.hpp>
#include <msgt/errors.hpp>
#include <msgt/inclusion.hpp>
#include <msgt/integrate.hpp>
#include <msgt/registry.hpp>
#include <msgt/serialize.hpp>
#include <msgt/smallgain.hpp>

#include <json.hpp>

namespace msgt::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Argument and file parsing helpers
// ---------------------------------------------------------------------------

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(std::string("malformed ") + what + " '" + text + "'");
        }
    }
    if (out.empty()) throw InputError(std::string("empty ") + what);
    return out;
}

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;  // 0 when the spec is LO:HI only
};

RangeSpec parse_range(const std::string& text, bool with_count) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    const std::size_t expected = with_count ? 3 : 2;
    if (parts.size() != expected) {
        throw InputError("malformed range '" + text + "' (expected " +
                         (with_count ? "LO:HI:N" : "LO:HI") + ")");
    }
    RangeSpec spec;
    try {
        spec.lo = std::stod(parts[0]);
        spec.hi = std::stod(parts[1]);
        if (with_count) spec.n = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw InputError("malformed range '" + text + "'");
    }
    if (!(spec.lo < spec.hi)) throw InputError("range '" + text + "' needs LO < HI");
    if (with_count && spec.n < 2) throw InputError("range '" + text + "' needs N >= 2");
    return spec;
}

/// Rows of "t,value" (comma or whitespace separated), '#' comments allowed.
std::vector<std::array<double, 2>> parse_pair_rows(const std::string& text,
                                                   const std::string& origin) {
    std::vector<std::array<double, 2>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        if (!(row >> a)) continue;  // blank line
        if (!(row >> b)) {
            throw ParseError("expected two numbers per row in " + origin, line_no, 1);
        }
        rows.push_back({a, b});
    }
    if (rows.empty()) throw InputError("no data rows in " + origin);
    return rows;
}

InputSignal parse_input_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw InputError("malformed input spec '" + spec +
                         "' (expected const:V, pwc:FILE, or sampled:FILE)");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "const") {
        return InputSignal::constant(parse_number_list(arg, "input value")[0]);
    }
    if (kind == "pwc" || kind == "sampled") {
        auto rows = parse_pair_rows(read_file(arg), "'" + arg + "'");
        std::vector<double> times, values;
        for (const auto& r : rows) {
            times.push_back(r[0]);
            values.push_back(r[1]);
        }
        return kind == "pwc" ? InputSignal::piecewise_constant(std::move(times), std::move(values))
                             : InputSignal::sampled(std::move(times), std::move(values));
    }
    throw InputError("unknown input kind '" + kind + "'");
}

std::string first_keyword(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string tok;
        if (row >> tok) return tok;
    }
    return "";
}

// Loop files describe an interconnection:
//   loop <name>
//   x <system-name-or-path>
//   z <system-name-or-path>
//   x_box LO HI / z_box LO HI / w_range LO HI / y_range LO HI / bound_offset V
Interconnection parse_loop_text(const std::string& text, const std::string& origin) {
    Interconnection ic;
    bool have_x = false, have_z = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    auto resolve_sub = [&](const std::string& ref) -> SystemDef {
        if (auto sys = builtin_system(ref)) return *sys;
        return parse_system_file(ref);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string key;
        if (!(row >> key)) continue;
        if (key == "loop") {
            row >> ic.name;
        } else if (key == "x" || key == "z") {
            std::string ref;
            if (!(row >> ref)) throw ParseError("missing subsystem reference", line_no, 1);
            (key == "x" ? ic.sys_x : ic.sys_z) = resolve_sub(ref);
            (key == "x" ? have_x : have_z) = true;
        } else if (key == "x_box" || key == "z_box" || key == "w_range" || key == "y_range") {
            double lo = 0.0, hi = 0.0;
            if (!(row >> lo >> hi)) throw ParseError("expected two bounds after " + key, line_no, 1);
            std::array<double, 2> v{lo, hi};
            if (key == "x_box") ic.x_box = v;
            else if (key == "z_box") ic.z_box = v;
            else if (key == "w_range") ic.w_range = v;
            else ic.y_range = v;
        } else if (key == "bound_offset") {
            double v = 0.0;
            if (!(row >> v)) throw ParseError("expected a value after bound_offset", line_no, 1);
            ic.state_bound_offset = v;
        } else {
            throw ParseError("unknown loop directive '" + key + "' in " + origin, line_no, 1);
        }
    }
    if (!have_x || !have_z) {
        throw InputError("loop file " + origin + " must name both subsystems (x and z)");
    }
    if (ic.name.empty()) ic.name = "loop";
    ic.validate();
    return ic;
}

// Name resolution precedes file lookup everywhere a system or map is expected.

std::optional<SystemDef> resolve_system(const std::string& arg) {
    if (auto sys = builtin_system(arg)) return sys;
    if (std::filesystem::exists(arg) && first_keyword(read_file(arg)) == "system") {
        return parse_system_file(arg);
    }
    return std::nullopt;
}

std::optional<Interconnection> resolve_interconnection(const std::string& arg) {
    if (auto ic = builtin_interconnection(arg)) return ic;
    if (std::filesystem::exists(arg) && first_keyword(read_file(arg)) == "loop") {
        return parse_loop_text(read_file(arg), "'" + arg + "'");
    }
    return std::nullopt;
}

MultiMapPtr resolve_map(const std::string& arg) {
    if (MultiMapPtr map = builtin_multimap(arg)) return map;
    if (!std::filesystem::exists(arg)) {
        throw InputError("'" + arg + "' is neither a built-in example nor a file; run "
                         "'mono-sgt examples' for the list");
    }
    const std::string text = read_file(arg);
    const std::string keyword = first_keyword(text);
    if (keyword == "system") {
        return std::make_shared<CharacteristicMap>(parse_system(text), false, Interval{0.0, 50.0});
    }
    if (keyword == "loop") {
        Interconnection ic = parse_loop_text(text, "'" + arg + "'");
        return compose_maps(characteristic_kw(ic), characteristic_ky(ic));
    }
    std::vector<std::array<double, 2>> vertices = parse_pair_rows(text, "'" + arg + "'");
    return std::make_shared<PiecewiseLinearMap>(std::move(vertices),
                                                std::filesystem::path(arg).stem().string());
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

// ---------------------------------------------------------------------------
// Plot script generation (gnuplot text format, no rendering dependency)
// ---------------------------------------------------------------------------

std::string data_path_for(const std::string& script_path, const std::string& tag) {
    std::filesystem::path p(script_path);
    p.replace_extension("");
    return p.string() + "_" + tag + ".dat";
}

void plot_polyline(const PiecewiseLinearMap& map, const std::string& script_path) {
    const std::string dat = data_path_for(script_path, "map");
    std::ostringstream data;
    for (const auto& v : map.vertices()) {
        data << format_double(v[0]) << " " << format_double(v[1]) << "\n";
    }
    write_file(dat, data.str());
    std::ostringstream gp;
    gp << "# mono-sgt plot: piecewise-linear map with the diagonal\n"
       << "set title '" << map.describe() << "'\n"
       << "set xlabel 'w'\nset ylabel 'F(w)'\nset key off\n"
       << "plot '" << dat << "' with linespoints lw 2, x with lines dt 2\n";
    write_file(script_path, gp.str());
}

void plot_artifact(const std::string& artifact, const std::string& script_path) {
    // Built-in map names get the polyline recipe directly.
    if (MultiMapPtr map = builtin_multimap(artifact)) {
        if (auto pwl = std::dynamic_pointer_cast<const PiecewiseLinearMap>(map)) {
            plot_polyline(*pwl, script_path);
            return;
        }
    }
    const std::string text = read_file(artifact);

    if (!text.empty() && (text[0] == '{' || text[0] == '[')) {
        ordered_json j = ordered_json::parse(text);
        std::ostringstream gp;
        if (j.contains("intervals")) {
            // Cardinality profile: horizontal count segments plus fold markers.
            const std::string dat = data_path_for(script_path, "profile");
            std::ostringstream data;
            for (const auto& run : j["intervals"]) {
                data << format_double(run[0].get<double>()) << " " << run[2].get<int>() << "\n"
                     << format_double(run[1].get<double>()) << " " << run[2].get<int>() << "\n\n";
            }
            write_file(dat, data.str());
            gp << "# mono-sgt plot: branch-count profile\n"
               << "set xlabel 'u'\nset ylabel 'branch count'\nset yrange [0:*]\nset key off\n";
            for (const auto& f : j["folds"]) {
                gp << "set arrow from " << format_double(f.get<double>())
                   << ", graph 0 to " << format_double(f.get<double>()) << ", graph 1 nohead dt 3\n";
            }
            gp << "plot '" << dat << "' with lines lw 2\n";
        } else if (j.contains("fixed_points")) {
            const std::string dat = data_path_for(script_path, "fixed_points");
            std::ostringstream data;
            for (const auto& w : j["fixed_points"]) {
                data << format_double(w.get<double>()) << " " << format_double(w.get<double>())
                     << "\n";
            }
            write_file(dat, data.str());
            gp << "# mono-sgt plot: fixed points on the diagonal\n"
               << "set key off\nplot x with lines dt 2, '" << dat << "' with points pt 7 ps 2\n";
        } else if (j.contains("attractive_set")) {
            const std::string dat = data_path_for(script_path, "attractive");
            std::ostringstream data;
            for (const auto& p : j["attractive_set"]) {
                for (const auto& z : p["z_set"]) {
                    data << format_double(p["x"].get<double>()) << " "
                         << format_double(z.get<double>()) << "\n";
                }
            }
            write_file(dat, data.str());
            gp << "# mono-sgt plot: attractive set in the (x, z) plane\n"
               << "set xlabel 'x'\nset ylabel 'z'\nset key off\n"
               << "plot '" << dat << "' with points pt 7 ps 2\n";
        } else if (j.contains("starts")) {
            // Grid classification: per-start path values over the step index.
            const std::string dat = data_path_for(script_path, "paths");
            std::ostringstream data;
            for (const auto& s : j["starts"]) {
                for (const auto& p : s["paths"]) {
                    std::size_t k = 0;
                    for (const auto& v : p["values"]) {
                        data << k++ << " " << format_double(v.get<double>()) << "\n";
                    }
                    data << "\n";
                }
            }
            write_file(dat, data.str());
            gp << "# mono-sgt plot: inclusion paths\nset xlabel 'step'\nset ylabel 'w'\n"
               << "set key off\nplot '" << dat << "' with linespoints\n";
        } else {
            throw InputError("unrecognized JSON artifact '" + artifact + "'");
        }
        write_file(script_path, gp.str());
        return;
    }

    // CSV artifacts, recognized by header.
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    std::ostringstream gp;
    if (header.rfind("u,branch_index,value", 0) == 0) {
        const std::string dat = data_path_for(script_path, "char");
        std::ostringstream data;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
            data << line << "\n";
        }
        write_file(dat, data.str());
        gp << "# mono-sgt plot: characteristic branches\n"
           << "set xlabel 'u'\nset ylabel 'k(u)'\nset key off\n"
           << "plot '" << dat << "' using 1:3 with points pt 7 ps 0.4\n";
    } else if (header.rfind("start,step,value,branch", 0) == 0) {
        // Path CSV: staircase (cobweb) segments per path plus the diagonal.
        const std::string dat = data_path_for(script_path, "cobweb");
        std::ostringstream data;
        std::string line;
        double prev = 0.0;
        bool have_prev = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line[0] == '#') {
                data << "\n";
                have_prev = false;
                continue;
            }
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
            std::istringstream row(line);
            double start = 0.0, step = 0.0, value = 0.0;
            row >> start >> step >> value;
            if (have_prev) {
                data << format_double(prev) << " " << format_double(prev) << "\n"
                     << format_double(prev) << " " << format_double(value) << "\n";
            }
            prev = value;
            have_prev = true;
        }
        write_file(dat, data.str());
        gp << "# mono-sgt plot: cobweb of inclusion paths\n"
           << "set xlabel 'w_k'\nset ylabel 'w_{k+1}'\nset key off\n"
           << "plot x with lines dt 2, '" << dat << "' with lines\n";
    } else if (header.rfind("t,", 0) == 0) {
        const std::string dat = data_path_for(script_path, "traj");
        std::ostringstream data;
        std::string line;
        while (std::getline(in, line)) {
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
            data << line << "\n";
        }
        write_file(dat, data.str());
        std::vector<std::string> columns;
        {
            std::istringstream hs(header);
            std::string col;
            while (std::getline(hs, col, ',')) columns.push_back(col);
        }
        gp << "# mono-sgt plot: trajectory\nset xlabel 't'\nset key outside\nplot";
        for (std::size_t c = 1; c < columns.size(); ++c) {
            gp << (c == 1 ? " " : ", ") << "'" << dat << "' using 1:" << (c + 1)
               << " with lines title '" << columns[c] << "'";
        }
        gp << "\n";
    } else {
        throw InputError("unrecognized artifact '" + artifact + "'");
    }
    write_file(script_path, gp.str());
}

// ---------------------------------------------------------------------------
// Subcommand bodies (return the process exit code)
// ---------------------------------------------------------------------------

int cmd_parse(const std::string& target) {
    const SystemDef sys = parse_system(read_file(target));
    std::cout << "ok: system " << sys.name << " dim " << sys.dim << " state_cone "
              << sys.state_cone.to_string() << " input_cone " << sys.input_cone.to_string()
              << " output_cone " << sys.output_cone.to_string() << "\n";
    return 0;
}

int cmd_simulate(const std::string& target, const std::string& x0_text,
                 const std::string& input_spec, double t_final, const std::string& tol_text,
                 const std::string& out_path) {
    const std::vector<double> x0 = parse_number_list(x0_text, "--x0");
    IntegrateOptions opts;
    if (!tol_text.empty()) {
        const auto tols = parse_number_list(tol_text, "--tol");
        if (tols.size() != 2) throw InputError("--tol expects REL,ABS");
        opts.rel_tol = tols[0];
        opts.abs_tol = tols[1];
    }

    if (auto ic = resolve_interconnection(target)) {
        if (!input_spec.empty()) {
            throw InputError("closed-loop simulation takes no input signal");
        }
        LoopTrajectory traj = integrate_loop(*ic, x0, t_final, opts);
        emit(out_path, loop_trajectory_to_csv(traj, ic->sys_x.dim));
        return 0;
    }
    if (auto sys = resolve_system(target)) {
        const InputSignal input =
            input_spec.empty() ? InputSignal::constant(0.0) : parse_input_spec(input_spec);
        Trajectory traj = integrate(*sys, x0, input, t_final, opts);
        emit(out_path, trajectory_to_csv(traj));
        return 0;
    }
    throw InputError("'" + target + "' is neither a built-in name nor a system/loop file");
}

int cmd_char(const std::string& target, const std::string& u_spec, const std::string& out_path,
             const std::string& csv_path) {
    const RangeSpec range = parse_range(u_spec, true);
    MultiMapPtr map = resolve_map(target);
    const CardinalityProfile profile = cardinality_profile(*map, range.lo, range.hi, range.n);

    ordered_json j;
    j["map"] = map->describe();
    j["u"] = ordered_json::array({range.lo, range.hi, range.n});
    j["profile"] = ordered_json::parse(profile_to_json(profile));
    ordered_json samples = ordered_json::array();
    for (int i = 0; i < range.n; ++i) {
        const double u = range.lo + (range.hi - range.lo) * static_cast<double>(i) / (range.n - 1);
        const std::vector<double> vals = map->values(u);
        for (std::size_t b = 0; b < vals.size(); ++b) {
            samples.push_back(ordered_json::array({u, b, vals[b]}));
        }
    }
    j["samples"] = samples;
    emit(out_path, j.dump(2) + "\n");
    if (!csv_path.empty()) {
        write_file(csv_path, characteristic_samples_csv(*map, range.lo, range.hi, range.n));
    }
    return 0;
}

int cmd_iterate(const std::string& target, double w0, int depth, int branch_cap, double tol,
                const std::string& out_path) {
    MultiMapPtr map = resolve_map(target);
    IterateOptions opts;
    opts.tol = tol;
    const PathSet set = iterate_paths(*map, w0, depth, branch_cap, opts);
    emit(out_path, paths_to_csv(set, w0));
    return 0;
}

int cmd_fixed_points(const std::string& target, const std::string& range_spec, int grid,
                     double tol, const std::string& out_path) {
    const RangeSpec range = parse_range(range_spec, false);
    MultiMapPtr map = resolve_map(target);
    const FixedPointResult result = find_fixed_points_detailed(*map, range.lo, range.hi, grid, tol);
    emit(out_path, fixed_points_to_json(result) + "\n");
    return 0;
}

int cmd_verify(const std::string& target, const std::string& report_path,
               const std::string& grid_spec, double t_final, const std::string& budget_json) {
    auto ic = resolve_interconnection(target);
    if (!ic) {
        throw InputError("'" + target + "' is neither a built-in interconnection nor a loop file");
    }
    VerificationBudget budget;
    if (!budget_json.empty()) budget = budget_from_json(budget_json);
    if (!grid_spec.empty()) {
        const auto x = grid_spec.find('x');
        if (x == std::string::npos) throw InputError("--grid expects GxH, e.g. 5x5");
        budget.loop_grid_w = std::stoi(grid_spec.substr(0, x));
        budget.loop_grid_h = std::stoi(grid_spec.substr(x + 1));
    }
    if (t_final > 0.0) budget.t_final = t_final;

    const VerificationReport report = verify_hypotheses(*ic, budget);
    emit(report_path, verification_report_to_json(report) + "\n");
    if (!report_path.empty()) {
        // The JSON went to a file; mirror it as readable text on stdout.
        std::cout << verification_report_to_text(report);
    }
    if (report.verdict != "pass") {
        std::cerr << "verdict: " << report.verdict << " (blocking: " << report.blocking << ")\n";
        return 1;
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"mono-sgt: characteristics, discrete inclusions, and small-gain "
                 "verification for monotone SISO feedback loops"};
    app.require_subcommand(1);

    // parse
    std::string parse_target;
    auto* sub_parse = app.add_subcommand("parse", "validate a system configuration file");
    sub_parse->add_option("file", parse_target, "configuration file")->required();

    // simulate
    std::string sim_target, sim_x0, sim_input, sim_tol, sim_out;
    double sim_t_final = 60.0;
    auto* sub_sim = app.add_subcommand("simulate", "integrate a system or a closed loop");
    sub_sim->add_option("target", sim_target, "built-in name or system/loop file")->required();
    sub_sim->add_option("--x0", sim_x0, "initial state, comma separated")->required();
    sub_sim->add_option("--input", sim_input, "const:V, pwc:FILE, or sampled:FILE");
    sub_sim->add_option("--t-final", sim_t_final, "horizon (default 60)");
    sub_sim->add_option("--tol", sim_tol, "REL,ABS integrator tolerances");
    sub_sim->add_option("--out", sim_out, "output CSV path (default stdout)");

    // char
    std::string char_target, char_u, char_out, char_csv;
    auto* sub_char = app.add_subcommand("char", "cardinality profile and branch samples");
    sub_char->add_option("target", char_target, "built-in name or system/map file")->required();
    sub_char->add_option("--u", char_u, "input grid LO:HI:N")->required();
    sub_char->add_option("--out", char_out, "output JSON path (default stdout)");
    sub_char->add_option("--csv", char_csv, "also write u,branch_index,value CSV here");

    // iterate
    std::string it_target, it_out;
    double it_w0 = 0.0, it_tol = 1e-9;
    int it_depth = 40, it_cap = 10'000;
    auto* sub_it = app.add_subcommand("iterate", "enumerate inclusion paths from a start");
    sub_it->add_option("target", it_target, "built-in name or map file")->required();
    sub_it->add_option("--w0", it_w0, "start value")->required();
    sub_it->add_option("--depth", it_depth, "maximum steps (default 40)");
    sub_it->add_option("--branch-cap", it_cap, "path budget (default 10000)");
    sub_it->add_option("--tol", it_tol, "classification tolerance (default 1e-9)");
    sub_it->add_option("--out", it_out, "output CSV path (default stdout)");

    // fixed-points
    std::string fp_target, fp_range, fp_out;
    int fp_grid = 1024;
    double fp_tol = 1e-9;
    auto* sub_fp = app.add_subcommand("fixed-points", "solve w in F(w) on a range");
    sub_fp->add_option("target", fp_target, "built-in name or map file")->required();
    sub_fp->add_option("--range", fp_range, "search range LO:HI")->required();
    sub_fp->add_option("--grid", fp_grid, "scan grid (default 1024)");
    sub_fp->add_option("--tol", fp_tol, "membership tolerance (default 1e-9)");
    sub_fp->add_option("--out", fp_out, "output JSON path (default stdout)");

    // verify
    std::string ver_target, ver_report, ver_grid, ver_budget;
    double ver_t_final = 0.0;
    auto* sub_ver = app.add_subcommand("verify", "verify the small-gain hypotheses");
    sub_ver->add_option("target", ver_target, "built-in interconnection or loop file")->required();
    sub_ver->add_option("--report", ver_report, "report JSON path (default stdout)");
    sub_ver->add_option("--grid", ver_grid, "initial-condition grid GxH (default 5x5)");
    sub_ver->add_option("--t-final", ver_t_final, "closed-loop horizon (default 60)");
    sub_ver->add_option("--budget", ver_budget, "JSON fragment of budget overrides");

    // examples
    auto* sub_ex = app.add_subcommand("examples", "list the built-in examples");

    // plot
    std::string plot_target, plot_script;
    auto* sub_plot = app.add_subcommand("plot", "emit a gnuplot script for an artifact");
    sub_plot->add_option("artifact", plot_target, "CSV/JSON artifact or built-in map name")
        ->required();
    sub_plot->add_option("--script", plot_script, "output .gp path")->required();

    std::vector<const char*> argv;
    argv.push_back("mono-sgt");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (sub_parse->parsed()) return cmd_parse(parse_target);
        if (sub_sim->parsed()) {
            return cmd_simulate(sim_target, sim_x0, sim_input, sim_t_final, sim_tol, sim_out);
        }
        if (sub_char->parsed()) return cmd_char(char_target, char_u, char_out, char_csv);
        if (sub_it->parsed()) return cmd_iterate(it_target, it_w0, it_depth, it_cap, it_tol, it_out);
        if (sub_fp->parsed()) return cmd_fixed_points(fp_target, fp_range, fp_grid, fp_tol, fp_out);
        if (sub_ver->parsed()) {
            return cmd_verify(ver_target, ver_report, ver_grid, ver_t_final, ver_budget);
        }
        if (sub_ex->parsed()) {
            std::cout << registry_listing();
            return 0;
        }
        if (sub_plot->parsed()) {
            plot_artifact(plot_target, plot_script);
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace msgt::cli
