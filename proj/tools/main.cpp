#include "implosion/cli.hpp"

int main(int argc, char** argv) {
    return implosion::cli::run(argc, argv);
}
