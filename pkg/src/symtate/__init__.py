"""Exact computations for Tate homology of u-equivariant doubly filtered complexes."""
from .algebra import (FgAbGroup, HomologyData, HomologyMorphism, IntMatrix, LaurentPoly,
                      RatMatrix, Ring, smith_normal_form)
from .complex import (BaseGenerator, BoundaryTerm, EquivariantComplex, TruncationSpec,
                      WindowComplex, instantiate_window, reduce_complex, u_shift, validate)
from .errors import *  # noqa: F401,F403
from .homology import (GradedHomology, homology, induced_inclusion, induced_map,
                       induced_projection, les_check)
from .limits import (BidirectGrid, GridSpec, HorizonProbe, TateDiagram, backwards_split,
                     four_tate_groups, localize_module, sh_equivariant_module,
                     sigma_surjectivity, u_periodic)
from .localization import (LinearEndoSpace, LocalizationResult, LocallyFiniteSpace,
                           counterexample_probe, eventual_image, graded_degree, localize,
                           tate_triple_compare)
from .models import (ExampleBundle, all_bundles, cn_complex, local_orbit, rabinowitz_C,
                     t_star_s2, torus, xn_rank_report)
from .towers import (LimitResult, Periodic, StableFrom, Tower, TowerColimit, Undecided,
                     direct_limit, inverse_limit)

__version__ = "0.1.0"
