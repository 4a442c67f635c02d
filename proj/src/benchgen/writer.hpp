#pragma once

#include <string>
#include <vector>

namespace ifsguard::benchgen {

/// Accumulates a flat netlist. Gate helpers return the output net name;
/// unnamed outputs get fresh `n<k>` names.
class NetlistWriter {
 public:
  explicit NetlistWriter(std::string module) : module_(std::move(module)) {}

  std::string input(const std::string& name) {
    inputs_.push_back(name);
    return name;
  }
  void output(const std::string& name) { outputs_.push_back(name); }
  void wire(const std::string& name) { wires_.push_back(name); }

  std::string gate(const std::string& kind, const std::vector<std::string>& ins, std::string out = {}) {
    if (out.empty()) {
      out = "n" + std::to_string(next_net_++);
      wires_.push_back(out);
    }
    std::string line = "  " + kind + " g" + std::to_string(next_cell_++) + " (.Y(" + out + ")";
    if (kind == "MUX2") {
      line += ", .S(" + ins[0] + "), .A(" + ins[1] + "), .B(" + ins[2] + ")";
    } else {
      for (std::size_t i = 0; i < ins.size(); ++i) line += ", ." + std::string(1, static_cast<char>('A' + i)) + "(" + ins[i] + ")";
    }
    body_.push_back(line + ");");
    return out;
  }

  std::string not_(const std::string& a, std::string out = {}) { return gate("NOT", {a}, std::move(out)); }
  std::string buf(const std::string& a, std::string out = {}) { return gate("BUF", {a}, std::move(out)); }
  std::string xor2(const std::string& a, const std::string& b, std::string out = {}) {
    return gate("XOR", {a, b}, std::move(out));
  }
  std::string mux(const std::string& sel, const std::string& a, const std::string& b, std::string out = {}) {
    return gate("MUX2", {sel, a, b}, std::move(out));
  }

  /// AND/OR over any number of inputs; wide gates become trees of at most
  /// eight inputs. A single input is returned unchanged.
  std::string reduce(const std::string& kind, std::vector<std::string> ins, std::string out = {}) {
    if (ins.size() == 1 && out.empty()) return ins[0];
    if (ins.size() == 1) return buf(ins[0], std::move(out));
    while (ins.size() > 8) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < ins.size(); i += 8) {
        std::vector<std::string> chunk(ins.begin() + static_cast<long>(i),
                                       ins.begin() + static_cast<long>(std::min(ins.size(), i + 8)));
        next.push_back(chunk.size() == 1 ? chunk[0] : gate(kind, chunk));
      }
      ins = std::move(next);
    }
    return gate(kind, ins, std::move(out));
  }

  void dff(const std::string& inst, const std::string& d, const std::string& q, bool reset,
           const std::string& clock = "clk") {
    body_.push_back("  DFF " + inst + " (.D(" + d + "), .Q(" + q + "), .CK(" + clock + ")" +
                    (reset ? ", .RN(rstn)" : "") + ");");
  }

  void latch(const std::string& inst, const std::string& d, const std::string& q, const std::string& enable) {
    body_.push_back("  DLATCH " + inst + " (.D(" + d + "), .Q(" + q + "), .G(" + enable + "));");
  }

  std::string text() const {
    std::string ports;
    for (const auto& p : inputs_) ports += (ports.empty() ? "" : ", ") + p;
    for (const auto& p : outputs_) ports += (ports.empty() ? "" : ", ") + p;
    std::string out = "module " + module_ + " (" + ports + ");\n";
    out += list("input", inputs_) + list("output", outputs_) + list("wire", wires_);
    for (const auto& l : body_) out += l + "\n";
    return out + "endmodule\n";
  }

 private:
  static std::string list(const char* kw, const std::vector<std::string>& names) {
    if (names.empty()) return {};
    std::string out = std::string("  ") + kw;
    for (std::size_t i = 0; i < names.size(); ++i) {
      out += (i ? ", " : " ") + names[i];
      if (i % 8 == 7 && i + 1 < names.size()) out += "\n   ";
    }
    return out + ";\n";
  }

  std::string module_;
  std::vector<std::string> inputs_, outputs_, wires_, body_;
  int next_net_ = 0, next_cell_ = 0;
};

}  // namespace ifsguard::benchgen
