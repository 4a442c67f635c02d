#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifsguard/netlist.hpp"

namespace ifsguard {

// Incremental construction of a CircuitGraph; finish() validates and freezes.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string module_name);

  void declare_net(const std::string& name, SourceLocation loc);
  void add_primary_input(const std::string& name, SourceLocation loc);
  void add_primary_output(const std::string& name, SourceLocation loc);
  void add_cell(const std::string& name, CellKind kind, const std::vector<std::string>& inputs,
                const std::string& output, SourceLocation loc);
  void add_ff(const std::string& name, const std::string& d, const std::string& q, const std::string& clock,
              const std::optional<std::string>& reset_n, SourceLocation loc);
  void add_latch(const std::string& name, const std::string& d, const std::string& q, const std::string& enable,
                 SourceLocation loc);

  CircuitGraph finish();

 private:
  NetId use_net(const std::string& name, SourceLocation loc);
  void drive(NetId net, Driver driver, SourceLocation loc);
  void add_sink(NetId net, Sink sink);
  SourceLocation sink_location(const Sink& sink) const;
  std::string sink_name(const Sink& sink) const;
  void check_instance_name(const std::string& name, SourceLocation loc);

  CircuitGraph g_;
  std::vector<SourceLocation> decl_loc_;
  std::vector<std::string> instance_names_;
};

}  // namespace ifsguard
