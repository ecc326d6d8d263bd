#ifndef CHORDCODEC_CHORDCODEC_HPP
#define CHORDCODEC_CHORDCODEC_HPP

#include "chordcodec/bitblock.hpp"
#include "chordcodec/bitio.hpp"
#include "chordcodec/codec.hpp"
#include "chordcodec/combinatorics.hpp"
#include "chordcodec/container.hpp"
#include "chordcodec/errors.hpp"
#include "chordcodec/fixed.hpp"
#include "chordcodec/keytable.hpp"
#include "chordcodec/projection.hpp"

#endif // CHORDCODEC_CHORDCODEC_HPP
