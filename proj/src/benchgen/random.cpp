#include "ifsguard/benchgen.hpp"

namespace ifsguard::benchgen {

// Gates only read earlier signals, so the design is acyclic; flip-flop
// outputs are available from the start. Late signals are preferred for
// flip-flop data and outputs so most of the logic stays live.
std::string random_design(std::mt19937& rng, const RandomSpec& spec) {
  static const char* kKinds[] = {"AND", "OR", "NAND", "NOR", "XOR", "XNOR", "NOT", "BUF", "MUX2"};
  std::vector<std::string> avail;
  std::string ports = "clk, rstn", decl = "  input clk, rstn", wires, body;
  for (int i = 0; i < spec.inputs; ++i) {
    std::string n = "a" + std::to_string(i);
    ports += ", " + n;
    decl += ", " + n;
    avail.push_back(n);
  }
  decl += ";\n";
  for (int f = 0; f < spec.ffs; ++f) {
    avail.push_back("q" + std::to_string(f));
    wires += (wires.empty() ? "" : ", ") + avail.back();
  }
  auto any = [&]() { return avail[rng() % avail.size()]; };
  for (int c = 0; c < spec.cells; ++c) {
    std::string out = "w" + std::to_string(c);
    wires += (wires.empty() ? "" : ", ") + out;
    int k = static_cast<int>(rng() % 9);
    body += std::string("  ") + kKinds[k] + " c" + std::to_string(c) + " (.Y(" + out + ")";
    if (k == 6 || k == 7) {
      body += ", .A(" + any() + ")";
    } else if (k == 8) {
      body += ", .S(" + any() + "), .A(" + any() + "), .B(" + any() + ")";
    } else {
      body += ", .A(" + any() + "), .B(" + any() + ")";
      if (rng() % 4 == 0) body += ", .C(" + any() + ")";
    }
    body += ");\n";
    avail.push_back(out);
  }
  auto late = [&]() {
    std::size_t lo = avail.size() / 2;
    return avail[lo + rng() % (avail.size() - lo)];
  };
  for (int f = 0; f < spec.ffs; ++f) {
    body += "  DFF r" + std::to_string(f) + " (.D(" + late() + "), .Q(q" + std::to_string(f) + "), .CK(clk)" +
            (rng() % 2 ? ", .RN(rstn)" : "") + ");\n";
  }
  std::string outs;
  for (int o = 0; o < spec.outputs; ++o) {
    std::string n = "y" + std::to_string(o);
    ports += ", " + n;
    outs += (o ? ", " : "") + n;
    body += "  BUF ob" + std::to_string(o) + " (.Y(" + n + "), .A(" + late() + "));\n";
  }
  return "module rnd (" + ports + ");\n" + decl + "  output " + outs + ";\n  wire " + wires + ";\n" + body +
         "endmodule\n";
}

}  // namespace ifsguard::benchgen
