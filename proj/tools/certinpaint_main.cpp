#include "certinpaint/cli.hpp"

int main(int argc, char** argv) { return certinpaint::run_cli(argc, argv); }
