// specp: batch driver for special p-group invariants.
//   specp run    — one group: structure/multiplier/wedge/tensor/capability
//   specp grid   — family sweep with a match/mismatch summary
//   specp witt   — Witt numbers and the basic-commutator basis
//   specp oracle — brute-force cross-check of the symbolic square engine
// Exit codes: 0 all match or known discrepancy, 2 novel mismatch,
// 3 uncertified square, 4 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specp/hall.hpp"
#include "specp/report.hpp"

using namespace specp;

namespace {

PcPresentation build_group(const std::string& family, const std::string& input,
                           int d, int p, int t) {
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_presentation(text.str());
  }
  if (family == "free-special")
    return t == 0 ? free_special(d, p) : rank_full_with_t(d, p, t);
  if (family == "rank-full") return rank_full_with_t(d, p, t);
  if (family == "rank-deficient") return rank_deficient_standard(d, p);
  if (family == "non-capable-witness") return non_capable_witness(d, p);
  if (family == "elementary-abelian") return elementary_abelian(d, p);
  throw std::runtime_error("unknown family: " + family);
}

int exit_code_for(const std::vector<const InvariantReport*>& reps) {
  bool uncert = false;
  for (const auto* r : reps) {
    if (r->any_novel_mismatch()) return 2;
    if (!r->all_certified()) uncert = true;
  }
  return uncert ? 3 : 0;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"special p-group invariant toolkit"};
  app.require_subcommand(1);

  // ---- run ---------------------------------------------------------------
  auto* runc = app.add_subcommand("run", "run the pipeline on one group");
  std::string family = "free-special", input, format = "json", outfile;
  int d = 3, p = 3, t = 0;
  std::vector<std::string> whats;
  bool all = false;
  runc->add_option("--family", family,
                   "free-special|rank-full|rank-deficient|non-capable-witness|"
                   "elementary-abelian");
  runc->add_option("--input", input, "presentation file (overrides --family)");
  runc->add_option("-d", d, "main generator count");
  runc->add_option("-p", p, "odd prime");
  runc->add_option("-t", t, "rank of the power map (rank-full families)");
  runc->add_option("--what", whats,
                   "sections: structure multiplier wedge tensor capability");
  runc->add_flag("--all", all, "all sections");
  runc->add_option("--format", format, "json|markdown");
  runc->add_option("-o,--output", outfile, "output file (default stdout)");

  // ---- grid --------------------------------------------------------------
  auto* gridc = app.add_subcommand("grid", "sweep families over a grid");
  std::vector<int> ps{3}, ds{3}, ts{0};
  std::vector<std::string> families{"free-special"};
  std::string gformat = "json", goutfile;
  gridc->add_option("-p", ps, "primes");
  gridc->add_option("-d", ds, "generator counts");
  gridc->add_option("-t", ts, "power-map ranks");
  gridc->add_option("--family", families, "families (free-special, rank-deficient)");
  gridc->add_option("--format", gformat, "json|markdown");
  gridc->add_option("-o,--output", goutfile, "output file (default stdout)");

  // ---- witt --------------------------------------------------------------
  auto* wittc = app.add_subcommand("witt", "Witt numbers / basic commutators");
  int wn = 3, wd = 3;
  bool basis = false;
  wittc->add_option("-n", wn, "weight")->required();
  wittc->add_option("-d", wd, "letters")->required();
  wittc->add_flag("--basis", basis, "print the ordered basic commutators");

  // ---- oracle ------------------------------------------------------------
  auto* oraclec =
      app.add_subcommand("oracle", "cross-check square() against oracle_square()");
  long long max_order = 81;
  oraclec->add_option("--max-order", max_order, "largest group order to test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (*runc) {
      SectionSet what;
      if (all || whats.empty()) {
        what = SectionSet::all();
      } else {
        for (const auto& w : whats) {
          SectionSet s = SectionSet::only(w);
          what.structure |= s.structure;
          what.multiplier |= s.multiplier;
          what.wedge |= s.wedge;
          what.tensor |= s.tensor;
          what.capability |= s.capability;
        }
      }
      auto G = build_group(family, input, d, p, t);
      auto rep = run(G, what);
      write_out(outfile, format == "markdown" ? emit_markdown(rep) : emit_json(rep));
      return exit_code_for({&rep});
    }
    if (*gridc) {
      auto gr = run_grid(ps, ds, ts, families);
      write_out(goutfile,
                gformat == "markdown" ? emit_markdown(gr) : emit_json(gr));
      std::vector<const InvariantReport*> reps;
      for (const auto& r : gr.reports) reps.push_back(&r);
      return exit_code_for(reps);
    }
    if (*wittc) {
      std::cout << "chi_" << wn << "(" << wd << ") = " << witt_chi(wn, wd) << "\n";
      if (basis || wn <= 4) {
        HallBasis hb(wd, std::min(wn, 4));
        for (int w = 1; w <= std::min(wn, 4); ++w)
          std::cout << "weight " << w << ": " << hb.count_of_weight(w)
                    << " basic commutators\n";
        if (basis)
          for (const auto& e : hb.entries())
            std::cout << "  " << e.weight << "  " << hb.str(e) << "\n";
      }
      return 0;
    }
    if (*oraclec) {
      std::vector<PcPresentation> groups;
      groups.push_back(elementary_abelian(1, 3));
      groups.push_back(elementary_abelian(2, 3));
      groups.push_back(elementary_abelian(3, 3));
      groups.push_back(abelian_p2_p(2, 3));
      groups.push_back(extraspecial(3, 3, true));
      groups.push_back(extraspecial(3, 3, false));
      groups.push_back(extraspecial(3, 4, true));
      groups.push_back(extraspecial(3, 4, false));
      bool ok = true;
      for (const auto& G : groups) {
        long long order = 1;
        for (int i = 0; i < G.order_exponent(); ++i) order *= G.p;
        if (order > max_order) continue;
        for (auto mode : {SquareMode::Wedge, SquareMode::Tensor}) {
          auto eng = square(G, mode);
          auto orc = oracle_square(G, mode);
          bool same = eng.certified && orc.certified &&
                      eng.structure == orc.structure &&
                      (mode == SquareMode::Wedge
                           ? eng.m_structure == orc.m_structure
                           : eng.j2_structure == orc.j2_structure &&
                                 eng.nabla_structure == orc.nabla_structure);
          std::cout << (same ? "ok   " : "FAIL ") << G.name << " "
                    << (mode == SquareMode::Wedge ? "wedge" : "tensor") << " "
                    << eng.structure.str() << " vs " << orc.structure.str()
                    << "\n";
          ok = ok && same;
        }
      }
      return ok ? 0 : 2;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 4;
}
