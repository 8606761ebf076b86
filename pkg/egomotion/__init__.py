from .motion_field import matrix_A, matrix_B, motion_field_jacobian
from .problem import EgoProblem, NormalFlowObs, build_problem, derotate
from .solver import TranslationEstimate, TranslationSolver, angle_between
from .svm_solver import LiblinearSVMSolver, SVMConfig, SVMSolver, solve_svm
from .negative_depth_solver import NegativeDepthConfig, NegativeDepthSolver, solve_negative_depth

SOLVERS = {'svm': SVMSolver, 'liblinear': LiblinearSVMSolver, 'negdepth': NegativeDepthSolver}

__all__ = [
    'matrix_A', 'matrix_B', 'motion_field_jacobian', 'EgoProblem', 'NormalFlowObs', 'build_problem', 'derotate',
    'TranslationEstimate', 'TranslationSolver', 'angle_between', 'LiblinearSVMSolver', 'SVMConfig', 'SVMSolver',
    'solve_svm', 'NegativeDepthConfig', 'NegativeDepthSolver', 'solve_negative_depth', 'SOLVERS'
]
