#include "frapm/cli.hpp"

int main(int argc, char** argv) { return frapm::parse_and_dispatch(argc, argv); }
