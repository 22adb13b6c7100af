// mllg: decide whether weighted linkings denote a proof net, with witnesses.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mllg/error.hpp"
#include "mllg/glue.hpp"
#include "mllg/logic.hpp"
#include "mllg/proofnet.hpp"
#include "mllg/rewrite.hpp"
#include "mllg/witness.hpp"

using namespace mllg;
using nlohmann::json;

namespace {

enum Exit { kAccept = 0, kReject = 1, kInput = 2, kOutside = 3 };

struct Options {
  std::string input;
  std::vector<std::string> terms;  // "coeff:links"
  std::string links;
  std::string semiring = "nat";
  bool mix = false;
  bool json_out = false;
  bool dot = false;
  std::string family;
  Index n = 2;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  std::string kind;
  std::string s_value = "1";
  bool preserve_cycle = false;
  bool mix_form = false;
  std::size_t term = 1;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Input, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_file(const std::string& s) {
  std::error_code ec;
  return std::filesystem::is_regular_file(s, ec);
}

LinComb load(const Options& o, bool need_terms = true) {
  if (o.input.empty()) fail(ErrorKind::Input, "no input: give a sequent or a combination JSON file");
  if (looks_like_file(o.input)) {
    if (!o.links.empty() || !o.terms.empty()) fail(ErrorKind::Input, "--links/--term cannot be combined with a JSON file");
    json j;
    try {
      j = json::parse(slurp(o.input));
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Input, o.input + ": " + e.what());
    }
    return lincomb_from_json(j);
  }
  const Semiring& sr = semiring(o.semiring);
  Sequent s = parse_sequent(o.input);
  std::vector<LinTerm> terms;
  if (!o.links.empty()) terms.push_back(LinTerm{sr.one, parse_links(s, o.links)});
  for (auto& t : o.terms) {
    auto colon = t.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Input, "--term expects 'coeff:links', got '" + t + "'");
    terms.push_back(LinTerm{parse_scalar(sr, t.substr(0, colon)), parse_links(s, t.substr(colon + 1))});
  }
  if (need_terms && terms.empty()) fail(ErrorKind::Input, "no linking given (use --links or --term)");
  return make_lincomb(sr, s, terms);
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

std::string describe(const LinComb& c) {
  std::ostringstream os;
  os << "sequent  " << to_string(c.sequent) << "\n";
  for (auto& t : c.terms) os << "  " << format_scalar(t.coeff) << " * [" << to_string(t.linking) << "]\n";
  return os.str();
}

int cmd_check(const Options& o) {
  LinComb c = load(o);
  if (c.terms.size() != 1) fail(ErrorKind::Input, "check takes a single linking");
  const Linking& l = c.terms[0].linking;
  if (o.dot) {
    std::cout << to_dot(c.sequent, l);
    return kAccept;
  }
  bool acyclic = !has_switching_cycle(c.sequent, l);
  bool connected = first_switching_connected(c.sequent, l);
  bool net = o.mix ? is_mix_net(c.sequent, l) : is_mll_net(c.sequent, l);
  json j = {{"sequent", to_string(c.sequent)}, {"linking", to_json(l)}, {"mode", o.mix ? "mix" : "mll"},
            {"acyclic", acyclic}, {"net", net}};
  if (acyclic) j["connected"] = connected;
  if (is_mdnf(c.sequent)) j["mdnf_fast_check"] = mdnf_fast_check(c.sequent, l, o.mix ? Mode::Mix : Mode::Mll);
  if (!acyclic)
    if (auto cyc = find_minimal_cycle(c.sequent, l)) j["cycle"] = cyc->links();
  std::ostringstream os;
  os << (net ? "net" : "not a net") << " (" << (o.mix ? "MLL+Mix" : "MLL") << "): " << (acyclic ? "acyclic" : "cyclic");
  if (acyclic) os << ", " << (connected ? "connected" : "disconnected");
  os << "\n";
  emit(o, j, os.str());
  return net ? kAccept : kReject;
}

int cmd_normalize(const Options& o) {
  LinComb c = load(o);
  if (o.preserve_cycle && o.mix_form) fail(ErrorKind::Input, "--preserve-cycle and --mix-form are exclusive");
  json j;
  RewriteTrace trace;
  LinComb out;
  if (o.preserve_cycle) {
    if (o.term < 1 || o.term > c.terms.size()) fail(ErrorKind::Input, "--term-index out of range");
    auto cyc = find_minimal_cycle(c.sequent, c.terms[o.term - 1].linking);
    if (!cyc) fail(ErrorKind::Input, "normalize --preserve-cycle: the chosen linking is acyclic");
    CycleNormalized cn = normalize_preserving_cycle(c, o.term - 1, *cyc);
    out = cn.comb;
    trace = cn.trace;
    j["cycle"] = cn.cycle.links();
  } else if (o.mix_form) {
    Normalized nm = normalize_mdnf(c);
    MixNormalized mn = mix_normal_form(nm.comb);
    out = mn.comb;
    trace = nm.trace;
    trace.insert(trace.end(), mn.trace.begin(), mn.trace.end());
    j["cycle"] = mn.cycle.links();
    j["gamma"] = mn.gamma;
    j["delta"] = mn.delta;
  } else {
    Normalized nm = normalize_mdnf(c);
    out = nm.comb;
    trace = nm.trace;
  }
  j["combination"] = to_json(out);
  j["trace"] = to_json(trace);
  std::ostringstream os;
  os << describe(out) << "trace (" << trace.size() << " steps)\n";
  for (auto& e : trace) {
    os << "  " << rule_name(e.step.rule) << " at [";
    for (std::size_t k = 0; k < e.step.path.size(); ++k) os << (k ? "," : "") << e.step.path[k];
    os << "]\n";
  }
  emit(o, j, os.str());
  return kAccept;
}

std::string witness_text(const Witness& w) {
  std::ostringstream os;
  os << "witness  " << witness_kind_name(w.kind) << " over " << family_name(w.family) << "_" << w.n << "\n";
  if (w.kind != WitnessKind::ScalarSum) {
    os << "sequent  " << to_string(w.comb.sequent) << "\n";
    for (std::size_t m = 0; m < w.block_tensors.size(); ++m)
      os << "  block " << m + 1 << ": " << (w.block_tensors[m] ? to_string(*w.block_tensors[m]) : std::string("(open)")) << "\n";
    if (w.contraction) os << "contraction  " << to_string(*w.contraction) << "\n";
  }
  os << "violation  " << w.violation << "\n";
  return os.str();
}

int cmd_decide(const Options& o) {
  LinComb c = load(o);
  Decision d = decide(c, o.mix ? Mode::Mix : Mode::Mll);
  std::ostringstream os;
  os << verdict_name(d.verdict) << ": " << d.reason << "\n";
  if (d.witness) os << witness_text(*d.witness);
  if (!d.trace.empty()) os << "rewrite trace: " << d.trace.size() << " steps\n";
  json j = to_json(d);
  j["semiring"] = c.sr->name;
  emit(o, j, os.str());
  switch (d.verdict) {
    case Decision::Verdict::Accept: return kAccept;
    case Decision::Verdict::Reject: return kReject;
    default: return kOutside;
  }
}

int cmd_witness(const Options& o) {
  LinComb c = load(o);
  RewriteTrace trace;
  Witness w = forced_witness(c, parse_witness_kind(o.kind), &trace);
  json j = to_json(w);
  j["semiring"] = c.sr->name;
  if (!trace.empty()) j["trace"] = to_json(trace);
  emit(o, j, witness_text(w));
  return kReject;
}

int cmd_enumerate(const Options& o) {
  LinComb c = load(o, false);
  std::string diag;
  auto all = enumerate_linkings(c.sequent, &diag);
  if (!diag.empty() && all.empty()) fail(ErrorKind::Input, diag);
  if (o.limit && all.size() > o.limit) {
    std::mt19937_64 rng(o.seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(o.limit);
    std::sort(all.begin(), all.end());
  }
  json arr = json::array();
  std::ostringstream os;
  os << count_linkings(c.sequent) << " linkings of " << to_string(c.sequent) << "\n";
  for (auto& l : all) {
    bool mll = is_mll_net(c.sequent, l), mx = is_mix_net(c.sequent, l);
    arr.push_back({{"linking", to_json(l)}, {"mll_net", mll}, {"mix_net", mx}});
    os << "  [" << to_string(l) << "]  " << (mll ? "MLL net" : mx ? "Mix net only" : "not a net") << "\n";
  }
  emit(o, {{"sequent", to_string(c.sequent)}, {"count", count_linkings(c.sequent)}, {"linkings", arr}}, os.str());
  return kAccept;
}

int cmd_tensor(const Options& o) {
  LinComb c = load(o);
  if (o.n < 1) fail(ErrorKind::Input, "--n must be positive");
  DeltaExpr t = to_tensor(c, o.n);
  json j = {{"n", o.n}, {"tensor", to_json(t)}};
  std::ostringstream os;
  os << to_string(t) << "\n";
  int code = kAccept;
  if (!o.family.empty()) {
    if (!is_mdnf(c.sequent)) fail(ErrorKind::Input, "--family needs an MDNF sequent");
    Membership m = mdnf_value_membership(t.densify(), MdnfShape::from_sequent(c.sequent), parse_family(o.family), o.n);
    j["member"] = m.member;
    if (!m.member) j["certificate"] = m.certificate;
    os << (m.member ? "member" : "not a member") << " of the " << o.family << "_" << o.n << " value set\n";
    if (!m.member) os << m.certificate.dump() << "\n";
    code = m.member ? kAccept : kReject;
  }
  emit(o, j, os.str());
  return code;
}

int cmd_counterexample(const Options& o) {
  const Semiring& sr = semiring(o.semiring);
  ZeroSumReport r = zero_sum_counterexample(sr, parse_scalar(sr, o.s_value));
  json j = {{"combination", to_json(r.comb)}, {"verified", r.verified}, {"checks", r.log}};
  std::ostringstream os;
  os << describe(r.comb) << (r.verified ? "verified" : "NOT verified")
     << ": coefficients sum to one and the tensor lies in every S_n value set checked, yet it is no single linking\n";
  emit(o, j, os.str());
  return r.verified ? kAccept : kReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mllg: proof-net decisions for weighted linkings, with glued-model witnesses"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sc, bool input = true) {
    if (input) sc->add_option("input", o.input, "sequent text, or a combination JSON file");
    sc->add_option("--semiring", o.semiring, "bool, nat, int, rat or nonneg_rat");
    sc->add_flag("--json", o.json_out, "machine-readable output");
  };
  auto linking_opts = [&](CLI::App* sc) {
    sc->add_option("--links", o.links, "one linking with coefficient 1, e.g. \"1-2,3-4\"");
    sc->add_option("--term", o.terms, "weighted linking 'coeff:links' (repeatable)");
  };

  auto* check = app.add_subcommand("check", "classify one linking with the switching criterion");
  common(check);
  linking_opts(check);
  check->add_flag("--mix", o.mix, "MLL+Mix (acyclicity only)");
  check->add_flag("--dot", o.dot, "print the proof structure as DOT");

  auto* norm = app.add_subcommand("normalize", "rewrite to MDNF with a replayable trace");
  common(norm);
  linking_opts(norm);
  norm->add_flag("--preserve-cycle", o.preserve_cycle, "push the pars off a minimal switching cycle");
  norm->add_flag("--mix-form", o.mix_form, "single cyclic term to Gamma par Delta form");
  norm->add_option("--term-index", o.term, "term whose cycle is preserved (1-based)");

  auto* dec = app.add_subcommand("decide", "accept a proof net or reject with a witness");
  common(dec);
  linking_opts(dec);
  dec->add_flag("--mix", o.mix, "decide for MLL+Mix");

  auto* wit = app.add_subcommand("witness", "run one witness algorithm");
  common(wit);
  linking_opts(wit);
  wit->add_option("--kind", o.kind, "scalar_sum, cycle, disconnect, uniqueness, mix_uniqueness, mix_cycle")->required();

  auto* en = app.add_subcommand("enumerate", "list all linkings of a sequent with their classification");
  common(en);
  en->add_option("--limit", o.limit, "sample at most this many linkings");
  en->add_option("--seed", o.seed, "sampling seed");

  auto* ten = app.add_subcommand("tensor", "print the tensor of a combination");
  common(ten);
  linking_opts(ten);
  ten->add_option("--n", o.n, "dimension");
  ten->add_option("--family", o.family, "check value-set membership for A, C, S, D or C1");

  auto* cx = app.add_subcommand("counterexample", "the non-zero-sum-free counterexample on three pairs");
  common(cx, false);
  cx->add_option("--s", o.s_value, "the free scalar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }
  try {
    if (*check) return cmd_check(o);
    if (*norm) return cmd_normalize(o);
    if (*dec) return cmd_decide(o);
    if (*wit) return cmd_witness(o);
    if (*en) return cmd_enumerate(o);
    if (*ten) return cmd_tensor(o);
    if (*cx) return cmd_counterexample(o);
  } catch (const Error& e) {
    std::cerr << "mllg: " << kind_name(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Input: return kInput;
      case ErrorKind::Limit:
      case ErrorKind::OutsideTheory:
      case ErrorKind::Unsupported: return kOutside;
      case ErrorKind::NotApplicable: return kInput;
      default: return 4;
    }
  }
  return kInput;
}
