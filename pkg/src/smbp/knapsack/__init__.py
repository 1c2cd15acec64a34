from .bnc import solve_pwl_bnc
from .cuts import CutPool, separation_cut
from .heuristics import best_fit_greedy, fixing_greedy, max_cardinality_greedy
from .problem import (OPTIMAL, TIME_LIMIT, KnapsackProblem, KnapsackResult,
                      enumerate_knapsack, feasible_sets, random_knapsack,
                      read_knapsack, write_knapsack)
from .pwl import (PwlModel, adaptive_breakpoints, breakpoint_count, build_breakpoints,
                  equidistant_error, triangular_breakpoints)
from .solver import (PricingContext, closed_form_lower, exact_lower, exact_upper,
                     solve_knapsack, tighten_bounds)
