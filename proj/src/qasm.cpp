#include "qxtalk/qasm.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <vector>

namespace qxtalk {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, Punct, Arrow, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                              src_[pos_] == '_' || src_[pos_] == '-')) {
                    t.text.push_back(advance());
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                       ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
                        (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '.'))) {
                t.kind = Tok::Number;
                t.text.push_back(advance());
                while (pos_ < src_.size()) {
                    const char d = src_[pos_];
                    const bool exp_sign = (d == '-' || d == '+') && !t.text.empty() &&
                                          (t.text.back() == 'e' || t.text.back() == 'E');
                    if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign) {
                        t.text.push_back(advance());
                    } else {
                        break;
                    }
                }
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                t.kind = Tok::Arrow;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view("[](),;").find(c) != std::string_view::npos) {
                t.kind = Tok::Punct;
                t.text.push_back(advance());
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
            }
            out.push_back(std::move(t));
        }
    }

  private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct Operand {
    int index;
    const Token* at;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Circuit run() {
        if (peek().kind == Tok::Ident && peek().text == "OPENQASM-SUBSET") {
            next();
            const Token& v = expect(Tok::Number, "version number");
            if (v.text != "1") throw ParseError("unsupported version " + v.text, v.line, v.column);
            expect_punct(";");
        }
        std::vector<std::pair<Instruction, const Token*>> body;
        while (peek().kind != Tok::End) {
            const Token& head = expect(Tok::Ident, "statement");
            if (head.text == "qreg" || head.text == "creg") {
                declare(head);
                continue;
            }
            body.emplace_back(statement(head), &head);
        }
        Circuit c(qreg_size_.value_or(0), creg_size_.value_or(0));
        for (auto& [inst, at] : body) {
            try {
                c.append(std::move(inst));
            } catch (const CircuitError& e) {
                throw ParseError(e.what(), at->line, at->column);
            }
        }
        return c;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    const Token& expect(Tok kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind) throw ParseError(std::string("expected ") + what, t.line, t.column);
        return next();
    }

    void expect_punct(const char* p) {
        const Token& t = peek();
        if (t.kind != Tok::Punct || t.text != p) throw ParseError(std::string("expected '") + p + "'", t.line, t.column);
        next();
    }

    bool accept_punct(const char* p) {
        if (peek().kind == Tok::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }

    int integer(const Token& t) {
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("expected non-negative integer", t.line, t.column);
        }
        errno = 0;
        const long v = std::strtol(t.text.c_str(), nullptr, 10);
        if (errno != 0 || v > 1'000'000'000L) throw ParseError("integer out of range", t.line, t.column);
        return static_cast<int>(v);
    }

    void declare(const Token& head) {
        const Token& name = expect(Tok::Ident, "register name");
        expect_punct("[");
        const int size = integer(next());
        expect_punct("]");
        expect_punct(";");
        auto& slot = head.text == "qreg" ? qreg_size_ : creg_size_;
        auto& slot_name = head.text == "qreg" ? qreg_name_ : creg_name_;
        if (slot) throw ParseError("register already declared", head.line, head.column);
        slot = size;
        slot_name = name.text;
    }

    Operand operand(const std::optional<std::string>& reg, const std::optional<int>& size, const char* kind) {
        const Token& name = expect(Tok::Ident, kind);
        if (!reg || name.text != *reg) throw ParseError("undeclared register '" + name.text + "'", name.line, name.column);
        expect_punct("[");
        const Token& idx_tok = peek();
        const int idx = integer(next());
        expect_punct("]");
        if (idx >= *size) {
            throw ParseError("index " + std::to_string(idx) + " out of range for register '" + name.text + "'",
                             idx_tok.line, idx_tok.column);
        }
        return Operand{idx, &name};
    }

    Instruction statement(const Token& head) {
        const auto kind = gate_from_name(head.text);
        if (!kind) throw ParseError("unknown gate '" + head.text + "'", head.line, head.column);
        Instruction inst;
        inst.gate.kind = *kind;
        if (*kind == GateKind::RZ) {
            expect_punct("(");
            const Token& t = expect(Tok::Number, "angle");
            char* end = nullptr;
            inst.gate.angle = std::strtod(t.text.c_str(), &end);
            if (end == t.text.c_str() || *end != '\0') throw ParseError("malformed angle", t.line, t.column);
            expect_punct(")");
        } else if (*kind == GateKind::Delay) {
            expect_punct("(");
            inst.gate.delay = integer(next());
            const Token& unit = expect(Tok::Ident, "time unit");
            if (unit.text != "ns") throw ParseError("delay unit must be ns", unit.line, unit.column);
            expect_punct(")");
        }
        inst.qubits.push_back(operand(qreg_name_, qreg_size_, "qubit operand").index);
        if (*kind == GateKind::Measure) {
            if (peek().kind != Tok::Arrow) throw ParseError("expected '->'", peek().line, peek().column);
            next();
            inst.clbit = operand(creg_name_, creg_size_, "classical operand").index;
        } else {
            while (accept_punct(",")) inst.qubits.push_back(operand(qreg_name_, qreg_size_, "qubit operand").index);
        }
        expect_punct(";");
        return inst;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::optional<int> qreg_size_, creg_size_;
    std::optional<std::string> qreg_name_, creg_name_;
};

std::string format_angle(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Circuit parse_qasm(std::string_view text) {
    Lexer lex(text);
    Parser p(lex.run());
    return p.run();
}

std::string emit_qasm(const Circuit& c) {
    std::string out = "OPENQASM-SUBSET 1;\n";
    out += "qreg q[" + std::to_string(c.num_qubits()) + "];\n";
    if (c.num_clbits() > 0) out += "creg c[" + std::to_string(c.num_clbits()) + "];\n";
    for (const auto& inst : c.instructions()) {
        out += gate_name(inst.gate.kind);
        if (inst.gate.kind == GateKind::RZ) out += "(" + format_angle(inst.gate.angle) + ")";
        if (inst.gate.kind == GateKind::Delay) out += "(" + std::to_string(inst.gate.delay) + "ns)";
        out += ' ';
        for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
            if (i) out += ',';
            out += "q[" + std::to_string(inst.qubits[i]) + "]";
        }
        if (inst.gate.kind == GateKind::Measure) out += " -> c[" + std::to_string(inst.clbit) + "]";
        out += ";\n";
    }
    return out;
}

}  // namespace qxtalk
