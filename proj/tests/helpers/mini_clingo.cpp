// Minimal clingo-compatible executable backed by the reference semantics:
// reads a program on stdin, prints SATISFIABLE / UNSATISFIABLE and exits
// with 10 / 20, or reports a parse failure with exit code 65.
#include "streamforge/aspkit.hpp"
#include "streamforge/ground_eval.hpp"

#include <iostream>
#include <iterator>
#include <string>

int main() {
    std::string program((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    auto parsed = streamforge::asp::parse_program(program);
    if (!parsed.ok()) {
        const auto& e = parsed.errors.front();
        std::cerr << "<stdin>:" << e.line << ":" << e.column << ": error: " << e.message << "\n";
        std::cerr << "*** ERROR: (mini_clingo): parsing failed\n";
        return 65;
    }
    try {
        auto sat = streamforge::ground::check_sat(parsed.rules);
        bool yes = sat == streamforge::ground::Satisfiability::Sat;
        std::cout << "mini_clingo\nSolving...\n" << (yes ? "SATISFIABLE" : "UNSATISFIABLE") << "\n";
        return yes ? 10 : 20;
    } catch (const std::exception& e) {
        std::cerr << "*** ERROR: (mini_clingo): " << e.what() << "\n";
        return 65;
    }
}
