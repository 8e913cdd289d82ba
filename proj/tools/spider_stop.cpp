#include "spider/cli.hpp"

int main(int argc, char** argv) { return spider::cli::run(argc, argv); }
