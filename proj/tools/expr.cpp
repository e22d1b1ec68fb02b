#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <charconv>

#include "tscalc/format.hpp"

namespace tscalc::cli {

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind;
    std::size_t offset;
    double number = 0.0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        const char c = text_[pos_];
        switch (c) {
        case '+': tok_.kind = Token::Kind::Plus; ++pos_; return;
        case '-': tok_.kind = Token::Kind::Minus; ++pos_; return;
        case '*': tok_.kind = Token::Kind::Star; ++pos_; return;
        case '/': tok_.kind = Token::Kind::Slash; ++pos_; return;
        case '^': tok_.kind = Token::Kind::Caret; ++pos_; return;
        case '(': tok_.kind = Token::Kind::LParen; ++pos_; return;
        case ')': tok_.kind = Token::Kind::RParen; ++pos_; return;
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            double value = 0.0;
            auto res = std::from_chars(begin, end, value);
            if (res.ec != std::errc{})
                throw ParseError("malformed number", pos_);
            tok_.kind = Token::Kind::Number;
            tok_.number = value;
            pos_ = static_cast<std::size_t>(res.ptr - text_.data());
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            tok_.kind = Token::Kind::Ident;
            tok_.text = std::string(text_.substr(pos_, end - pos_));
            pos_ = end;
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token tok_;
};

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr number(double v) {
    Expr e;
    e.op = Expr::Op::Number;
    e.number = v;
    return make(std::move(e));
}

ExprPtr binary(Expr::Op op, ExprPtr l, ExprPtr r) {
    Expr e;
    e.op = op;
    e.lhs = std::move(l);
    e.rhs = std::move(r);
    return make(std::move(e));
}

ExprPtr unary(Expr::Op op, ExprPtr operand, std::string name = {}) {
    Expr e;
    e.op = op;
    e.call_name = std::move(name);
    e.lhs = std::move(operand);
    return make(std::move(e));
}

constexpr const char* kFunctions[] = {"exp", "ln", "sin", "cos", "sqrt"};

bool is_function(const std::string& name) {
    for (const char* f : kFunctions)
        if (name == f) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ExprPtr parse() {
        ExprPtr e = sum();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("trailing input; expected operator or end of expression", t.offset);
        return e;
    }

private:
    ExprPtr sum() {
        ExprPtr e = term();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::Kind::Plus) {
                lex_.take();
                e = binary(Expr::Op::Add, e, term());
            } else if (t.kind == Token::Kind::Minus) {
                lex_.take();
                e = binary(Expr::Op::Sub, e, term());
            } else {
                return e;
            }
        }
    }

    ExprPtr term() {
        ExprPtr e = unary_expr();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind == Token::Kind::Star) {
                lex_.take();
                e = binary(Expr::Op::Mul, e, unary_expr());
            } else if (t.kind == Token::Kind::Slash) {
                lex_.take();
                e = binary(Expr::Op::Div, e, unary_expr());
            } else {
                return e;
            }
        }
    }

    ExprPtr unary_expr() {
        if (lex_.peek().kind == Token::Kind::Minus) {
            lex_.take();
            return unary(Expr::Op::Neg, unary_expr());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (lex_.peek().kind == Token::Kind::Caret) {
            lex_.take();
            // Right-associative, and the exponent may start with a unary minus.
            return binary(Expr::Op::Pow, base, unary_expr());
        }
        return base;
    }

    ExprPtr primary() {
        Token t = lex_.take();
        switch (t.kind) {
        case Token::Kind::Number:
            return number(t.number);
        case Token::Kind::LParen: {
            ExprPtr e = sum();
            expect_rparen();
            return e;
        }
        case Token::Kind::Ident: {
            if (t.text == "t") {
                Expr e;
                e.op = Expr::Op::Var;
                return make(std::move(e));
            }
            if (!is_function(t.text))
                throw ParseError("unknown identifier '" + t.text +
                                     "'; expected t, a number, or exp/ln/sin/cos/sqrt",
                                 t.offset);
            const Token open = lex_.take();
            if (open.kind != Token::Kind::LParen)
                throw ParseError("expected '(' after function name", open.offset);
            ExprPtr arg = sum();
            expect_rparen();
            return unary(Expr::Op::Call, std::move(arg), t.text);
        }
        default:
            throw ParseError("expected a number, 't', '(', or a function call", t.offset);
        }
    }

    void expect_rparen() {
        const Token t = lex_.take();
        if (t.kind != Token::Kind::RParen) throw ParseError("expected ')'", t.offset);
    }

    Lexer lex_;
};

int precedence(const Expr& e) {
    switch (e.op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    case Expr::Op::Pow: return 4;
    default: return 5;
    }
}

void print_into(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    const bool parens =
        precedence(child) < min_prec || (child.op == Expr::Op::Number && child.number < 0);
    if (parens) out += '(';
    print_into(child, out);
    if (parens) out += ')';
}

void print_into(const Expr& e, std::string& out) {
    switch (e.op) {
    case Expr::Op::Number: out += format_real(e.number); return;
    case Expr::Op::Var: out += 't'; return;
    case Expr::Op::Add:
        print_child(*e.lhs, 1, out);
        out += '+';
        print_child(*e.rhs, 2, out);
        return;
    case Expr::Op::Sub:
        print_child(*e.lhs, 1, out);
        out += '-';
        print_child(*e.rhs, 2, out);
        return;
    case Expr::Op::Mul:
        print_child(*e.lhs, 2, out);
        out += '*';
        print_child(*e.rhs, 3, out);
        return;
    case Expr::Op::Div:
        print_child(*e.lhs, 2, out);
        out += '/';
        print_child(*e.rhs, 3, out);
        return;
    case Expr::Op::Neg:
        out += '-';
        print_child(*e.lhs, 3, out);
        return;
    case Expr::Op::Pow:
        print_child(*e.lhs, 5, out); // a^b^c parses as a^(b^c); parenthesize non-atoms
        out += '^';
        print_child(*e.rhs, 3, out);
        return;
    case Expr::Op::Call:
        out += e.call_name;
        out += '(';
        print_into(*e.lhs, out);
        out += ')';
        return;
    }
}

} // namespace

ExprPtr parse_expr(std::string_view text) {
    Parser parser(text);
    return parser.parse();
}

std::string print_expr(const Expr& e) {
    std::string out;
    print_into(e, out);
    return out;
}

double eval_expr(const Expr& e, double t) {
    switch (e.op) {
    case Expr::Op::Number: return e.number;
    case Expr::Op::Var: return t;
    case Expr::Op::Add: return eval_expr(*e.lhs, t) + eval_expr(*e.rhs, t);
    case Expr::Op::Sub: return eval_expr(*e.lhs, t) - eval_expr(*e.rhs, t);
    case Expr::Op::Mul: return eval_expr(*e.lhs, t) * eval_expr(*e.rhs, t);
    case Expr::Op::Div: return eval_expr(*e.lhs, t) / eval_expr(*e.rhs, t);
    case Expr::Op::Pow: return std::pow(eval_expr(*e.lhs, t), eval_expr(*e.rhs, t));
    case Expr::Op::Neg: return -eval_expr(*e.lhs, t);
    case Expr::Op::Call: {
        const double x = eval_expr(*e.lhs, t);
        if (e.call_name == "exp") return std::exp(x);
        if (e.call_name == "ln") return std::log(x);
        if (e.call_name == "sin") return std::sin(x);
        if (e.call_name == "cos") return std::cos(x);
        return std::sqrt(x);
    }
    }
    return 0.0; // unreachable
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
    case Expr::Op::Number: return a.number == b.number;
    case Expr::Op::Var: return true;
    case Expr::Op::Neg: return expr_equal(*a.lhs, *b.lhs);
    case Expr::Op::Call: return a.call_name == b.call_name && expr_equal(*a.lhs, *b.lhs);
    default: return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
}

} // namespace tscalc::cli
