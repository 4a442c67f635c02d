#pragma once

// Small hand-written netlists shared by the unit tests.

namespace ifsguard::testing {

inline constexpr const char* kC17 = R"(// ISCAS-85 c17
module c17 (N1, N2, N3, N6, N7, N22, N23);
  input N1, N2, N3, N6, N7;
  output N22, N23;
  wire N10, N11, N16, N19;
  NAND g1 (.Y(N10), .A(N1), .B(N3));
  NAND g2 (.Y(N11), .A(N3), .B(N6));
  NAND g3 (.Y(N16), .A(N2), .B(N11));
  NAND g4 (.Y(N19), .A(N11), .B(N7));
  NAND g5 (.Y(N22), .A(N10), .B(N16));
  NAND g6 (.Y(N23), .A(N16), .B(N19));
endmodule
)";

// 3-bit synchronous up-counter with enable; resets to 0.
inline constexpr const char* kCounter3 = R"(
module counter3 (clk, rstn, en, tc);
  input clk, rstn, en;
  output tc;
  wire q0, q1, q2, d0, d1, d2, c1, c2;
  XOR x0 (.Y(d0), .A(q0), .B(en));
  AND a1 (.Y(c1), .A(q0), .B(en));
  XOR x1 (.Y(d1), .A(q1), .B(c1));
  AND a2 (.Y(c2), .A(q1), .B(c1));
  XOR x2 (.Y(d2), .A(q2), .B(c2));
  AND t (.Y(tc), .A(q0), .B(q1), .C(q2));
  DFF r0 (.D(d0), .Q(q0), .CK(clk), .RN(rstn));
  DFF r1 (.D(d1), .Q(q1), .CK(clk), .RN(rstn));
  DFF r2 (.D(d2), .Q(q2), .CK(clk), .RN(rstn));
endmodule
)";

// Three-stage shift register without reset: a -> s0 -> s1 -> s2 -> y.
inline constexpr const char* kShift3 = R"(
module shift3 (clk, a, y);
  input clk, a;
  output y;
  wire s0, s1, s2;
  DFF f0 (.D(a), .Q(s0), .CK(clk));
  DFF f1 (.D(s0), .Q(s1), .CK(clk));
  DFF f2 (.D(s1), .Q(s2), .CK(clk));
  BUF b (.Y(y), .A(s2));
endmodule
)";

// One-hot ring of three resettable FFs; h0 resets to 0 as well, so the
// ring stays all-zero forever and a one-hot violation is never reachable.
inline constexpr const char* kRing3 = R"(
module ring3 (clk, rstn, go, o);
  input clk, rstn, go;
  output o;
  wire h0, h1, h2, n0, n1, n2;
  AND a0 (.Y(n0), .A(h2), .B(go));
  MUX2 m1 (.Y(n1), .S(go), .A(h1), .B(h0));
  MUX2 m2 (.Y(n2), .S(go), .A(h2), .B(h1));
  DFF f0 (.D(n0), .Q(h0), .CK(clk), .RN(rstn));
  DFF f1 (.D(n1), .Q(h1), .CK(clk), .RN(rstn));
  DFF f2 (.D(n2), .Q(h2), .CK(clk), .RN(rstn));
  OR o1 (.Y(o), .A(h0), .B(h1), .C(h2));
endmodule
)";

}  // namespace ifsguard::testing
