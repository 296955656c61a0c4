// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "windcast/commands.hpp"

int main(int argc, char** argv) { return windcast::run_cli(argc, argv, std::cout, std::cerr); }
