#ifndef OCTINPAINT_OCTINPAINT_HPP
#define OCTINPAINT_OCTINPAINT_HPP

#include "baseline.hpp"
#include "config.hpp"
#include "core.hpp"
#include "dictionary_io.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "image_io.hpp"
#include "inpaint.hpp"
#include "phantom.hpp"
#include "pipeline.hpp"
#include "preproc.hpp"
#include "resample.hpp"
#include "sparse.hpp"
#include "training.hpp"

#endif // OCTINPAINT_OCTINPAINT_HPP
