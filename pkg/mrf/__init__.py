"""
Markov random field checks of the perturbed-graph dependency pattern.

- gaussian: static Gaussian models, precisions and Schur-complement marginals
- discrete: factor-table fields, exact enumeration and pairwise CI tests
"""
from .gaussian import (
    GaussianNetworkModel,
    PrecisionMatrix,
    GaussianPerturbation,
    precision_of,
    marginal_precision,
    gaussian_joint_with_perturbations,
    observed_precision,
    GaussianVerification,
    verify_gaussian,
    random_gaussian_model,
    random_gaussian_perturbations,
    sample_gaussian_model,
)
from .discrete import (
    Factor,
    DiscreteMrf,
    PerturbFactor,
    MarginalTable,
    join_with_perturbations,
    joint_table,
    brute_marginal,
    CiTest,
    ci_test,
    conditional_independence,
    PairVerdict,
    MarkovAgreement,
    verify_pairwise_markov,
    random_positive_mrf,
    random_perturbations,
    noisy_copy,
)

__all__ = [
    'GaussianNetworkModel',
    'PrecisionMatrix',
    'GaussianPerturbation',
    'precision_of',
    'marginal_precision',
    'gaussian_joint_with_perturbations',
    'observed_precision',
    'GaussianVerification',
    'verify_gaussian',
    'random_gaussian_model',
    'random_gaussian_perturbations',
    'sample_gaussian_model',
    'Factor',
    'DiscreteMrf',
    'PerturbFactor',
    'MarginalTable',
    'join_with_perturbations',
    'joint_table',
    'brute_marginal',
    'CiTest',
    'ci_test',
    'conditional_independence',
    'PairVerdict',
    'MarkovAgreement',
    'verify_pairwise_markov',
    'random_positive_mrf',
    'random_perturbations',
    'noisy_copy',
]
