#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modkam::cli {

enum class Format { json, csv };

struct CommandConfig {
    std::string subcommand;
    std::string input;
    std::string output;   // file, or directory for kam-run; empty writes data to stdout
    Format format = Format::json;
    int threads = 1;
    unsigned long seed = 0;
    int verbosity = 0;
};

const std::vector<std::string>& subcommands();

// 0 ok, 1 analysis or hypothesis failure, 2 usage or schema error
int dispatch(const CommandConfig& config, std::ostream& out, std::ostream& err);

// argv front-end
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace modkam::cli
