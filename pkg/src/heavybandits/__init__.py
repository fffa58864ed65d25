"""Heavy-tailed bandits: robust mean estimation and perturbed exploration."""
from .influence import InfluenceParams, compute_bp, p_robust_estimate, psi, tail_bound
from .perturbations import PerturbationSpec, check_assumption2, inverse_cdf, ln_zeta, optimal_params
from .env import BanditInstance, NoiseSpec, draw_reward, make_gap_instance, nu_p_bound
from .estimators import EstimatorSpec, estimate
from .policies import APE2Policy, DSEEPolicy, PolicyState, RobustUCBPolicy, run_policy

__version__ = "0.1.0"
