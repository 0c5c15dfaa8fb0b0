#pragma once

// Mapping and decoder files.
//   mapping: header "v,f", one row per grid node, ascending v
//   decoder: header "u,g0,g1", one row per side-information node, ascending u
// Values are written with 17 significant digits. Readers reject anything else and
// report the offending line.

#include <iosfwd>
#include <string>

#include "onebit/model.hpp"

namespace onebit {

void write_mapping(std::ostream& out, const EncoderMapping& f);
void write_decoder(std::ostream& out, const DecoderTable& g);

void write_mapping_file(const std::string& path, const EncoderMapping& f);
void write_decoder_file(const std::string& path, const DecoderTable& g);

/// `sigma` is the std of the variable the grid discretizes (sigma_v for mappings,
/// sigma_u for decoders); it fixes the grid's halfwidth in sigmas.
EncoderMapping read_mapping(std::istream& in, double sigma, const std::string& name = "<mapping>");
DecoderTable read_decoder(std::istream& in, double sigma, const std::string& name = "<decoder>");

EncoderMapping read_mapping_file(const std::string& path, double sigma);
DecoderTable read_decoder_file(const std::string& path, double sigma);

}  // namespace onebit
