#include "ibundle/cli_app.hpp"

int main(int argc, char** argv) { return ibundle::cli::run(argc, argv); }
