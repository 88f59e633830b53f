#pragma once

// Umbrella header.

#include "vocoder/dsp/audio.hpp"
#include "vocoder/dsp/emphasis.hpp"
#include "vocoder/dsp/lpc.hpp"
#include "vocoder/dsp/mulaw.hpp"
#include "vocoder/dsp/spectrum.hpp"
#include "vocoder/error.hpp"
#include "vocoder/features/augment.hpp"
#include "vocoder/features/conditioning.hpp"
#include "vocoder/features/frame.hpp"
#include "vocoder/features/opnv.hpp"
#include "vocoder/io/fmtx.hpp"
#include "vocoder/io/wav.hpp"
#include "vocoder/nnet/block_sparse.hpp"
#include "vocoder/nnet/flops.hpp"
#include "vocoder/nnet/frame_net.hpp"
#include "vocoder/nnet/layers.hpp"
#include "vocoder/nnet/model.hpp"
#include "vocoder/nnet/model_io.hpp"
#include "vocoder/nnet/random_model.hpp"
#include "vocoder/nnet/sample_rate.hpp"
#include "vocoder/nnet/sampling.hpp"
#include "vocoder/synth/synth.hpp"
