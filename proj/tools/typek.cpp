#include <iostream>
#include <string>
#include <vector>

#include "typek/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return typek::app::run(args, std::cout, std::cerr);
}
