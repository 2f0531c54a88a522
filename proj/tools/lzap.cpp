#include "lzap/cli.hpp"

int main(int argc, char** argv) {
    return lzap::cli::run(argc, argv);
}
