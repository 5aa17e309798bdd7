// Command-line front end: reads a JSON problem file, runs the requested
// pipeline, and writes reports (JSON) or point data (CSV).
//
// Exit codes: 0 success, 2 when a supplied face is not invariant under the
// transition operator, 3 on validation errors (bad matrices, digits, masks,
// malformed problem files), 1 otherwise.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "tilereg/bspline.hpp"
#include "tilereg/io.hpp"

namespace {

using namespace tilereg;

struct CommonArgs {
    std::string input;
    std::string output_dir;
    std::optional<int> max_order;
    std::optional<double> tolerance;
    std::optional<int> depth;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
};

void emit(const CommonArgs& args, const std::string& filename, const std::string& text) {
    if (args.output_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(args.output_dir);
    write_text_file((std::filesystem::path(args.output_dir) / filename).string(), text);
}

Mask problem_mask(const ProblemFile& p, const DilationMatrix& M, int order) {
    if (p.mask_json) return parse_mask(*p.mask_json, M.n);
    if (!p.digits) throw ValidationError("problem needs 'mask' or 'digits'");
    if (!digits_valid(M, *p.digits))
        throw ValidationError("supplied digits are not coset representatives");
    DigitSet D;
    D.digits = *p.digits;
    return bspline_mask(D, order, M.m);
}

json analyze_one(const ProblemFile& p, const DilationMatrix& M, int order, double tol) {
    Mask mask = problem_mask(p, M, order);
    RegularityReport rep = regularity(M, mask, p.max_k, tol);
    bool want_faces = p.auto_faces || !p.faces_json.empty();
    if (want_faces) {
        int k = p.per_subspace_k.value_or(p.mask_json ? std::max(rep.sum_rules_order, 0)
                                                      : order);
        std::vector<FaceSpec> faces = p.auto_faces ? block_diagonal_faces(M, k)
                                                   : parse_faces(p.faces_json, M, k);
        rep.per_subspace = regularity_per_subspace(M, mask, faces, k, tol, &rep.notes);
        rep.certification = "FaceSupplied";
    }
    return report_to_json(rep);
}

int cmd_analyze(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    double tol = args.tolerance.value_or(p.nullspace_tol);
    std::optional<int> max_order = args.max_order ? args.max_order : p.max_order;

    json out;
    if (max_order && !p.mask_json) {
        json orders = json::array();
        for (int ell = 0; ell <= *max_order; ++ell) {
            json rep = analyze_one(p, M, ell, tol);
            rep["order"] = ell;
            orders.push_back(rep);
        }
        out["orders"] = orders;
    } else {
        out = analyze_one(p, M, p.order.value_or(0), tol);
    }
    emit(args, "report.json", to_text(out));
    return 0;
}

int cmd_omega(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    Mask mask = problem_mask(p, M, p.order.value_or(0));
    SupportSet S = omega(M, mask.support());
    emit(args, "omega.json", to_text(omega_to_json(S)));
    return 0;
}

int cmd_tile(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    DigitSet D;
    if (p.digits) {
        if (!digits_valid(M, *p.digits))
            throw ValidationError("supplied digits are not coset representatives");
        D.digits = *p.digits;
    } else {
        D = canonical_digits(M);
    }
    int depth = args.depth.value_or(p.depth);
    TileCloud cloud = tile_points(M, D, depth, std::nullopt, args.seed.value_or(p.seed));
    emit(args, "tile.csv", tile_cloud_csv(cloud, M.n));
    return 0;
}

int cmd_bspline(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    if (!p.digits) throw ValidationError("bspline needs 'digits'");
    if (!digits_valid(M, *p.digits))
        throw ValidationError("supplied digits are not coset representatives");
    DigitSet D;
    D.digits = *p.digits;
    Mask mask = bspline_mask(D, p.order.value_or(0), M.m);
    emit(args, "mask.json", to_text(mask_to_json(mask)));
    return 0;
}

int cmd_subdivide(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    Mask mask = problem_mask(p, M, p.order.value_or(0));
    int j = args.depth.value_or(p.depth);
    GridData g = sample_refinable(mask, M, j);
    emit(args, "subdivision.csv", grid_data_csv(g, M));
    return 0;
}

int cmd_design(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    MinimalMaskResult r = design_minimal_mask(M, p.order.value_or(0), p.nodes);
    json out;
    out["mask"] = mask_to_json(r.mask);
    out["nodes"] = r.system.nodes;
    out["two_v"] = r.system.two_v;
    out["sum_rules_order"] = sum_rules_order(r.mask, M);
    emit(args, "design.json", to_text(out));
    return 0;
}

int cmd_spectra(const CommonArgs& args) {
    ProblemFile p = parse_problem(load_json_file(args.input));
    DilationMatrix M = validate_dilation(p.matrix);
    emit(args, "spectra.json", to_text(spectra_to_json(spectral_moduli(M))));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularity of refinable functions with matrix dilations: transition "
                 "operators, tile B-splines, minimal masks, subdivision sampling"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", args.input, "problem file (JSON)")->required();
        sub->add_option("--output", args.output_dir, "output directory (default: stdout)");
        sub->add_option("--max-order", args.max_order, "batch orders 0..N");
        sub->add_option("--tolerance", args.tolerance, "null-space singular value threshold");
        sub->add_option("--depth", args.depth, "tile/subdivision depth");
        sub->add_option("--format", args.format, "json|csv (subcommand default applies)");
        sub->add_option("--seed", args.seed, "sampling seed");
    };

    std::map<std::string, std::function<int(const CommonArgs&)>> dispatch = {
        {"analyze", cmd_analyze},   {"omega", cmd_omega},     {"tile", cmd_tile},
        {"bspline", cmd_bspline},   {"subdivide", cmd_subdivide},
        {"design", cmd_design},     {"spectra", cmd_spectra},
    };
    std::map<std::string, std::string> help = {
        {"analyze", "regularity report (JSON)"},
        {"omega", "support set of the transition operator (JSON)"},
        {"tile", "attractor point cloud (CSV)"},
        {"bspline", "tile B-spline mask (JSON)"},
        {"subdivide", "subdivision samples on the M-adic grid (CSV)"},
        {"design", "minimal-support mask for |det M| = 2 (JSON)"},
        {"spectra", "eigenvalue moduli and multiplicities (JSON)"},
    };
    for (auto& [name, fn] : dispatch) add_common(app.add_subcommand(name, help[name]));

    CLI11_PARSE(app, argc, argv);

    std::string sub = app.get_subcommands().front()->get_name();
    try {
        return dispatch[sub](args);
    } catch (const tilereg::NotInvariant& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tilereg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
