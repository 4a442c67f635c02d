#include <doctest.h>

#include <random>
#include <set>

#include "ifsguard/sim.hpp"
#include "support/circuits.hpp"

using namespace ifsguard;

namespace {

// Random combinational netlist with every cell kind and wide fan-in.
CircuitGraph random_comb(std::mt19937& rng, int inputs, int cells) {
  static const char* kKinds[] = {"AND", "OR", "NAND", "NOR", "XOR", "XNOR", "NOT", "BUF", "MUX2"};
  std::string decl = "  input";
  std::vector<std::string> avail;
  for (int i = 0; i < inputs; ++i) {
    decl += (i ? ", i" : " i") + std::to_string(i);
    avail.push_back("i" + std::to_string(i));
  }
  decl += ";\n  output y;\n  wire";
  std::string body;
  auto any = [&]() { return avail[rng() % avail.size()]; };
  for (int c = 0; c < cells; ++c) {
    std::string out = "w" + std::to_string(c);
    decl += (c ? ", " : " ") + out;
    int k = static_cast<int>(rng() % 9);
    body += std::string("  ") + kKinds[k] + " c" + std::to_string(c) + " (.Y(" + out + ")";
    if (k == 6 || k == 7) {
      body += ", .A(" + any() + ")";
    } else if (k == 8) {
      body += ", .S(" + any() + "), .A(" + any() + "), .B(" + any() + ")";
    } else {
      int arity = 2 + static_cast<int>(rng() % 4);
      for (int a = 0; a < arity; ++a) body += std::string(", .") + static_cast<char>('A' + a) + "(" + any() + ")";
    }
    body += ");\n";
    avail.push_back(out);
  }
  body += "  BUF yb (.Y(y), .A(" + avail.back() + "));\n";
  return parse_netlist("module r (y);\n" + decl + ";\n" + body + "endmodule\n");
}

}  // namespace

TEST_CASE("every backend agrees with the scalar reference") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    CircuitGraph g = random_comb(rng, 4 + trial % 5, 20 + trial);
    std::vector<sim::ForcedNet> forced;
    if (trial % 3 == 0) forced.push_back({g.cells()[trial % g.cells().size()].output, trial % 2 == 0});
    sim::Program p = sim::Program::compile(g, forced);
    // odd lane counts exercise the AVX2 tail
    for (std::size_t lanes : {1u, 3u, 4u, 7u, 16u}) {
      std::vector<std::uint64_t> base(p.slot_count * lanes);
      std::uniform_int_distribution<std::uint64_t> bits;
      for (NetId pi : g.primary_inputs()) {
        for (std::size_t w = 0; w < lanes; ++w) base[index(pi) * lanes + w] = bits(rng);
      }
      auto ref = base;
      sim::kernels::eval_scalar(p, ref.data(), lanes);
      for (sim::Backend b : {sim::Backend::Word, sim::Backend::Avx2}) {
        if (!sim::backend_available(b)) continue;
        auto got = base;
        sim::evaluate(p, got, lanes, b);
        CAPTURE(sim::backend_name(b));
        CHECK(got == ref);
      }
    }
  }
}

TEST_CASE("c17 truth table through the block simulator") {
  CircuitGraph g = parse_netlist(testing::kC17);
  sim::BlockSimulator bs(g, {}, 1);
  const char* order[] = {"N1", "N2", "N3", "N6", "N7"};
  for (std::uint32_t v = 0; v < 5; ++v) sim::enumeration_pattern(bs.net(g.net_by_name(order[v])), v, 0);
  bs.evaluate();
  for (std::uint32_t p = 0; p < 32; ++p) {
    bool n1 = p & 1, n2 = p >> 1 & 1, n3 = p >> 2 & 1, n6 = p >> 3 & 1, n7 = p >> 4 & 1;
    bool n10 = !(n1 && n3), n11 = !(n3 && n6), n16 = !(n2 && n11), n19 = !(n11 && n7);
    bool n22 = !(n10 && n16), n23 = !(n16 && n19);
    CHECK(((bs.net(g.net_by_name("N22"))[0] >> p) & 1) == n22);
    CHECK(((bs.net(g.net_by_name("N23"))[0] >> p) & 1) == n23);
  }
}

TEST_CASE("forced nets override their driver") {
  CircuitGraph g = parse_netlist(testing::kC17);
  sim::ForcedNet f[] = {{g.net_by_name("N16"), true}};
  sim::BlockSimulator bs(g, f, 2);
  bs.evaluate();
  CHECK(bs.net(g.net_by_name("N16"))[0] == ~0ull);
  CHECK(bs.net(g.net_by_name("N16"))[1] == ~0ull);
}

TEST_CASE("enumeration patterns cover every assignment once") {
  std::vector<std::uint64_t> w(4);
  std::set<std::uint32_t> seen;
  for (std::uint64_t block = 0; block < 4; ++block) {
    std::vector<std::vector<std::uint64_t>> vars;
    for (std::uint32_t v = 0; v < 10; ++v) {
      sim::enumeration_pattern(w, v, block * 256);
      vars.push_back(w);
    }
    for (std::uint32_t lane = 0; lane < 256; ++lane) {
      std::uint32_t a = 0;
      for (std::uint32_t v = 0; v < 10; ++v) a |= static_cast<std::uint32_t>((vars[v][lane / 64] >> (lane % 64)) & 1) << v;
      CHECK(a == block * 256 + lane);
      seen.insert(a);
    }
  }
  CHECK(seen.size() == 1024);
}
