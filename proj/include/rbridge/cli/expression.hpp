#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace rbridge::cli {

/// Arithmetic expression over x1, x2 with + - * / ^, exp, cos, sin, abs and
/// the constant pi. Parsing errors throw ConfigError naming the bad token.
class Expression {
public:
    struct Node;

    static Expression parse(std::string_view text);

    [[nodiscard]] double eval(std::span<const double> x) const;
    /// Symbolic partial derivative with respect to x_{axis+1}.
    [[nodiscard]] Expression derivative(std::size_t axis) const;
    /// True if x_{axis+1} appears.
    [[nodiscard]] bool uses(std::size_t axis) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

private:
    Expression(std::shared_ptr<const Node> root, std::string text);

    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace rbridge::cli
