#ifndef EQUIDEFORM_EQUIDEFORM_HPP
#define EQUIDEFORM_EQUIDEFORM_HPP

#include <equideform/error.hpp>
#include <equideform/fp.hpp>
#include <equideform/series.hpp>
#include <equideform/linalg.hpp>
#include <equideform/smooth_local.hpp>
#include <equideform/tower.hpp>
#include <equideform/node_local.hpp>
#include <equideform/cohomology_oracle.hpp>
#include <equideform/global_curve.hpp>

#endif
