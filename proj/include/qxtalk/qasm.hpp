#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qxtalk/circuit.hpp"

namespace qxtalk {

/// Parse failure with a 1-based source position.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

/// Reads the OPENQASM-SUBSET text format:
///
///   OPENQASM-SUBSET 1;
///   qreg q[3];
///   creg c[3];
///   h q[0]; rz(0.25) q[1]; cx q[0],q[1];
///   delay(100ns) q[2]; barrier q[0],q[1];
///   measure q[0] -> c[0];   // comment
///
/// The header line is optional. Anything outside this grammar is rejected.
Circuit parse_qasm(std::string_view text);

/// Canonical text: header, register declarations, then one statement per
/// line. RZ angles are written with 17 significant digits so a re-parse is
/// exact.
std::string emit_qasm(const Circuit& c);

}  // namespace qxtalk
