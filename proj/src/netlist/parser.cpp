#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "graph_builder.hpp"
#include "ifsguard/netlist.hpp"

namespace ifsguard {
namespace {

enum class Tok { Ident, Const, LParen, RParen, Comma, Semi, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLocation loc;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/' || c == '.' || c == '[' ||
         c == ']';
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceLocation loc{line, col};
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (src.substr(i, 4) == "1'b0" || src.substr(i, 4) == "1'b1") {
      out.push_back({Tok::Const, std::string(src.substr(i, 4)), loc});
      advance(4);
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '.': kind = Tok::Dot; break;
      default:
        throw NetlistError(std::string("unexpected character '") + c + "'", loc);
    }
    out.push_back({kind, std::string(1, c), loc});
    advance(1);
  }
  out.push_back({Tok::End, "<eof>", {line, col}});
  return out;
}

struct PinConn {
  std::string pin;
  std::string net;
  SourceLocation loc;
};

struct Instance {
  std::string type;
  std::string name;
  std::vector<PinConn> pins;
  SourceLocation loc;
};

struct ModuleAst {
  std::string name;
  std::vector<std::string> ports;
  std::vector<std::string> inputs, outputs, wires;
  std::vector<Instance> instances;
  SourceLocation loc;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ModuleAst> parse_file() {
    std::vector<ModuleAst> mods;
    while (peek().kind != Tok::End) mods.push_back(parse_module());
    if (mods.empty()) throw NetlistError("no module found", peek().loc);
    return mods;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw NetlistError(std::string("expected ") + what + ", found '" + peek().text + "'", peek().loc);
    }
    return take();
  }

  void expect_keyword(const char* kw) {
    if (peek().kind != Tok::Ident || peek().text != kw) {
      throw NetlistError(std::string("expected '") + kw + "', found '" + peek().text + "'", peek().loc);
    }
    take();
  }

  std::vector<std::string> ident_list(Tok terminator) {
    std::vector<std::string> ids;
    if (peek().kind == terminator) return ids;
    for (;;) {
      ids.push_back(expect(Tok::Ident, "identifier").text);
      if (peek().kind != Tok::Comma) break;
      take();
    }
    return ids;
  }

  ModuleAst parse_module() {
    ModuleAst m;
    m.loc = peek().loc;
    expect_keyword("module");
    m.name = expect(Tok::Ident, "module name").text;
    expect(Tok::LParen, "'('");
    m.ports = ident_list(Tok::RParen);
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) throw NetlistError("expected statement, found '" + t.text + "'", t.loc);
      if (t.text == "endmodule") {
        take();
        return m;
      }
      if (t.text == "input" || t.text == "output" || t.text == "wire") {
        std::string kw = take().text;
        auto ids = ident_list(Tok::Semi);
        expect(Tok::Semi, "';'");
        auto& dst = kw == "input" ? m.inputs : kw == "output" ? m.outputs : m.wires;
        dst.insert(dst.end(), ids.begin(), ids.end());
        continue;
      }
      m.instances.push_back(parse_instance());
    }
  }

  Instance parse_instance() {
    Instance inst;
    inst.loc = peek().loc;
    inst.type = take().text;
    inst.name = expect(Tok::Ident, "instance name").text;
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      for (;;) {
        PinConn pc;
        pc.loc = peek().loc;
        expect(Tok::Dot, "'.'");
        pc.pin = expect(Tok::Ident, "pin name").text;
        expect(Tok::LParen, "'('");
        if (peek().kind == Tok::Const) {
          pc.net = take().text;
        } else {
          pc.net = expect(Tok::Ident, "net name").text;
        }
        expect(Tok::RParen, "')'");
        inst.pins.push_back(std::move(pc));
        if (peek().kind != Tok::Comma) break;
        take();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    return inst;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_primitive(std::string_view type) {
  return cell_kind_from_string(type).has_value() || type == "DFF" || type == "DLATCH";
}

// Inlines instances of user modules into the top module. Only one level of
// hierarchy is supported.
ModuleAst flatten(std::vector<ModuleAst> mods) {
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    if (!by_name.emplace(mods[i].name, i).second) {
      throw NetlistError("duplicate module '" + mods[i].name + "'", mods[i].loc);
    }
  }
  std::set<std::string> instantiated;
  for (const auto& m : mods)
    for (const auto& inst : m.instances)
      if (by_name.count(inst.type)) instantiated.insert(inst.type);

  std::size_t top = mods.size();
  for (std::size_t i = mods.size(); i-- > 0;) {
    if (!instantiated.count(mods[i].name)) {
      top = i;
      break;
    }
  }
  if (top == mods.size()) throw NetlistError("no top module (instantiation cycle)", mods.front().loc);

  ModuleAst out = mods[top];
  out.instances.clear();
  for (const auto& inst : mods[top].instances) {
    auto it = by_name.find(inst.type);
    if (it == by_name.end()) {
      if (!is_primitive(inst.type)) {
        throw NetlistError("unknown cell or module '" + inst.type + "'", inst.loc);
      }
      out.instances.push_back(inst);
      continue;
    }
    const ModuleAst& sub = mods[it->second];
    std::map<std::string, std::string> port_map;
    for (const auto& pc : inst.pins) {
      if (std::find(sub.ports.begin(), sub.ports.end(), pc.pin) == sub.ports.end()) {
        throw NetlistError("module '" + sub.name + "' has no port '" + pc.pin + "'", pc.loc);
      }
      port_map[pc.pin] = pc.net;
    }
    auto rename = [&](const std::string& net) -> std::string {
      if (net == "1'b0" || net == "1'b1") return net;
      auto p = port_map.find(net);
      if (p != port_map.end()) return p->second;
      return inst.name + "/" + net;
    };
    for (const auto& w : sub.wires) out.wires.push_back(inst.name + "/" + w);
    for (const auto& port : sub.ports) {
      if (!port_map.count(port)) out.wires.push_back(inst.name + "/" + port);
    }
    for (const auto& child : sub.instances) {
      if (!is_primitive(child.type)) {
        throw NetlistError("nested hierarchy below '" + sub.name + "' is not supported", child.loc);
      }
      Instance copy = child;
      copy.name = inst.name + "/" + child.name;
      for (auto& pc : copy.pins) pc.net = rename(pc.net);
      out.instances.push_back(std::move(copy));
    }
  }
  return out;
}

const PinConn* find_pin(const Instance& inst, std::string_view pin) {
  for (const auto& pc : inst.pins)
    if (pc.pin == pin) return &pc;
  return nullptr;
}

}  // namespace

CircuitGraph parse_netlist(std::string_view source) {
  Parser parser(tokenize(source));
  ModuleAst top = flatten(parser.parse_file());

  GraphBuilder b(top.name);
  std::set<std::string> declared_io;
  for (const auto& n : top.inputs) {
    b.declare_net(n, top.loc);
    b.add_primary_input(n, top.loc);
    declared_io.insert(n);
  }
  for (const auto& n : top.outputs) {
    b.declare_net(n, top.loc);
    declared_io.insert(n);
  }
  for (const auto& n : top.wires) b.declare_net(n, top.loc);
  for (const auto& p : top.ports) {
    if (!declared_io.count(p)) throw NetlistError("port '" + p + "' has no direction", top.loc);
  }

  for (const auto& inst : top.instances) {
    std::set<std::string> seen;
    for (const auto& pc : inst.pins) {
      if (!seen.insert(pc.pin).second) throw NetlistError("pin '" + pc.pin + "' connected twice", pc.loc);
    }
    auto pin_net = [&](std::string_view pin, bool required) -> std::optional<std::string> {
      const PinConn* pc = find_pin(inst, pin);
      if (!pc) {
        if (required) {
          throw NetlistError("instance '" + inst.name + "' is missing pin ." + std::string(pin), inst.loc);
        }
        return std::nullopt;
      }
      return pc->net;
    };
    auto check_pins = [&](std::initializer_list<std::string_view> allowed) {
      for (const auto& pc : inst.pins) {
        if (std::find(allowed.begin(), allowed.end(), pc.pin) == allowed.end()) {
          throw NetlistError("unknown pin ." + pc.pin + " on " + inst.type, pc.loc);
        }
      }
    };

    if (inst.type == "DFF") {
      check_pins({"D", "Q", "CK", "RN"});
      b.add_ff(inst.name, *pin_net("D", true), *pin_net("Q", true), *pin_net("CK", true), pin_net("RN", false),
               inst.loc);
      continue;
    }
    if (inst.type == "DLATCH") {
      check_pins({"D", "Q", "G"});
      b.add_latch(inst.name, *pin_net("D", true), *pin_net("Q", true), *pin_net("G", true), inst.loc);
      continue;
    }
    CellKind kind = *cell_kind_from_string(inst.type);
    std::vector<std::string> ins;
    if (kind == CellKind::Mux2) {
      check_pins({"Y", "S", "A", "B"});
      ins = {*pin_net("S", true), *pin_net("A", true), *pin_net("B", true)};
    } else if (kind == CellKind::Not || kind == CellKind::Buf) {
      check_pins({"Y", "A"});
      ins = {*pin_net("A", true)};
    } else {
      static constexpr std::string_view kPins[] = {"A", "B", "C", "D", "E", "F", "G", "H"};
      for (const auto& pc : inst.pins) {
        if (pc.pin == "Y") continue;
        if (std::find(std::begin(kPins), std::end(kPins), pc.pin) == std::end(kPins)) {
          throw NetlistError("unknown pin ." + pc.pin + " on " + inst.type, pc.loc);
        }
      }
      for (auto p : kPins) {
        auto n = pin_net(p, false);
        if (!n) break;
        ins.push_back(*n);
      }
      if (ins.size() < 2) throw NetlistError(inst.type + " needs at least pins .A and .B", inst.loc);
      if (ins.size() + 1 != inst.pins.size()) {
        throw NetlistError("input pins of '" + inst.name + "' must be consecutive from .A", inst.loc);
      }
    }
    b.add_cell(inst.name, kind, ins, *pin_net("Y", true), inst.loc);
  }

  for (const auto& n : top.outputs) b.add_primary_output(n, top.loc);
  return b.finish();
}

}  // namespace ifsguard
