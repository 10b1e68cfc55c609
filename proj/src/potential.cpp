#include "perpress/potential.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace perpress {

struct Potential::Node {
    enum class Kind { constant, log_deriv, coord_re, coord_im, sum, scale };
    Kind kind;
    double a = 0.0;  // constant value, logderiv weight t, or scale factor
    std::shared_ptr<const Node> left, right;
    int depth = 1;
};

namespace {

using Node = Potential::Node;
constexpr int kMaxDepth = 32;

std::shared_ptr<const Node> make_leaf(Node::Kind k, double a) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = a;
    n->depth = 1;
    return n;
}

std::shared_ptr<const Node> make_inner(Node::Kind k, double a,
                                       std::shared_ptr<const Node> l,
                                       std::shared_ptr<const Node> r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = a;
    n->depth = 1 + std::max(l ? l->depth : 0, r ? r->depth : 0);
    if (n->depth > kMaxDepth)
        throw std::invalid_argument("potential expression deeper than " +
                                    std::to_string(kMaxDepth));
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

double eval_node(const Node& n, const RationalMap& map, const cplx& z) {
    switch (n.kind) {
        case Node::Kind::constant:
            return n.a;
        case Node::Kind::log_deriv: {
            const double la = map.log_abs_derivative(z);
            if (!std::isfinite(la))
                throw std::domain_error(
                    "potential undefined: log|f'| diverges at (" +
                    std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                    ")");
            return -n.a * la;
        }
        case Node::Kind::coord_re:
            return z.real();
        case Node::Kind::coord_im:
            return z.imag();
        case Node::Kind::sum:
            return eval_node(*n.left, map, z) + eval_node(*n.right, map, z);
        case Node::Kind::scale:
            return n.a * eval_node(*n.left, map, z);
    }
    throw std::logic_error("unreachable potential node kind");
}

void print_node(const Node& n, std::ostringstream& os) {
    switch (n.kind) {
        case Node::Kind::constant:
            os << "const(" << n.a << ")";
            return;
        case Node::Kind::log_deriv:
            if (n.a == 1.0)
                os << "logderiv";
            else
                os << "logderiv(" << n.a << ")";
            return;
        case Node::Kind::coord_re:
            os << "re";
            return;
        case Node::Kind::coord_im:
            os << "im";
            return;
        case Node::Kind::sum:
            os << "sum(";
            print_node(*n.left, os);
            os << ", ";
            print_node(*n.right, os);
            os << ")";
            return;
        case Node::Kind::scale:
            os << "scale(" << n.a << ", ";
            print_node(*n.left, os);
            os << ")";
            return;
    }
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::shared_ptr<const Node> parse() {
        auto n = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return n;
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("potential parse error at position " +
                                    std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '+' || text_[pos_] == '-' ||
                text_[pos_] == '.' || text_[pos_] == 'e' ||
                text_[pos_] == 'E'))
            ++pos_;
        const std::string tok(text_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail("bad number '" + tok + "'");
            return v;
        } catch (const std::exception&) {
            fail("bad number '" + tok + "'");
        }
    }

    std::shared_ptr<const Node> expr() {
        const std::string name = ident();
        if (name == "const") {
            expect('(');
            const double a = number();
            expect(')');
            return make_leaf(Node::Kind::constant, a);
        }
        if (name == "logderiv") {
            double t = 1.0;
            if (consume('(')) {
                t = number();
                expect(')');
            }
            return make_leaf(Node::Kind::log_deriv, t);
        }
        if (name == "re") return make_leaf(Node::Kind::coord_re, 0.0);
        if (name == "im") return make_leaf(Node::Kind::coord_im, 0.0);
        if (name == "sum") {
            expect('(');
            auto l = expr();
            expect(',');
            auto r = expr();
            expect(')');
            return make_inner(Node::Kind::sum, 0.0, std::move(l),
                              std::move(r));
        }
        if (name == "scale") {
            expect('(');
            const double s = number();
            expect(',');
            auto e = expr();
            expect(')');
            return make_inner(Node::Kind::scale, s, std::move(e), nullptr);
        }
        fail("unknown potential '" + name + "'");
    }
};

}  // namespace

Potential Potential::constant(double a) {
    return Potential(make_leaf(Node::Kind::constant, a));
}
Potential Potential::log_deriv(double t) {
    return Potential(make_leaf(Node::Kind::log_deriv, t));
}
Potential Potential::coord_re() {
    return Potential(make_leaf(Node::Kind::coord_re, 0.0));
}
Potential Potential::coord_im() {
    return Potential(make_leaf(Node::Kind::coord_im, 0.0));
}
Potential Potential::sum(Potential a, Potential b) {
    return Potential(make_inner(Node::Kind::sum, 0.0, std::move(a.root_),
                                std::move(b.root_)));
}
Potential Potential::scale(double s, Potential e) {
    return Potential(
        make_inner(Node::Kind::scale, s, std::move(e.root_), nullptr));
}

Potential Potential::parse(std::string_view text) {
    return Potential(Parser(text).parse());
}

double Potential::eval(const RationalMap& map, cplx z) const {
    if (!is_finite_point(z))
        throw std::domain_error("potential evaluated at a non-finite point");
    return eval_node(*root_, map, z);
}

int Potential::depth() const { return root_->depth; }

std::string Potential::to_string() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

double birkhoff_sum(const Potential& phi, const RationalMap& map, cplx z,
                    int n) {
    if (n < 1) throw std::invalid_argument("birkhoff sum needs n >= 1");
    std::vector<cplx> orbit;
    const auto st = map.advance(z, n, orbit);
    if (st != RationalMap::AdvanceStatus::complete)
        throw std::domain_error(
            "orbit broke down at step " + std::to_string(orbit.size()) +
            " while forming a birkhoff sum");
    return birkhoff_sum(phi, map, orbit);
}

double birkhoff_sum(const Potential& phi, const RationalMap& map,
                    std::span<const cplx> orbit) {
    double s = 0.0;
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        try {
            s += phi.eval(map, orbit[k]);
        } catch (const std::domain_error& e) {
            throw std::domain_error("birkhoff sum failed at orbit step " +
                                    std::to_string(k) + ": " + e.what());
        }
    }
    return s;
}

}  // namespace perpress
