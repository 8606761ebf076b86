import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '../'))

import dataclasses
from typing import List, Optional, Sequence

import pandas as pd
import torch
from rtpt import RTPT

from datasets.event_slice_dataset import EventSliceDataset
from metrics.flow_metrics import FlowEvalReport
from models.normal_flow_mlp import NormalFlowMLP
from models.veckm import RandomProjection
from utils.losses import MotionFieldLoss, NormDirectionLoss
from utils.training import TrainConfig, train_model

LOSSES = {'motion_field': MotionFieldLoss, 'norm_direction': NormDirectionLoss}


def set_seed(seed: int):
    """
    Seeds torch and makes it behave deterministically.
    """
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)


def set_num_threads():
    """
    Caps the number of torch threads by the EVFLOW_THREADS environment variable.
    """
    threads = os.environ.get('EVFLOW_THREADS')
    if threads:
        try:
            num_threads = int(threads)
        except ValueError:
            raise ValueError(f'EVFLOW_THREADS has to be an integer, got "{threads}"')
        if num_threads < 1:
            raise ValueError('EVFLOW_THREADS has to be at least 1')
        torch.set_num_threads(num_threads)


def get_rtpt(name: str, max_iterations: int) -> RTPT:
    rtpt = RTPT(name_initials='EV', experiment_name=name, max_iterations=max_iterations)
    rtpt.start()
    return rtpt


def train(
    model: NormalFlowMLP,
    train_set: EventSliceDataset,
    val_set: Optional[EventSliceDataset],
    cfg: TrainConfig,
    projection: RandomProjection,
    loss_name: str = 'motion_field',
    filename: Optional[str] = None,
    log_file: Optional[str] = None,
    rtpt: RTPT = None,
    wandb=None
) -> List[float]:
    """
    Trains the given model with the given parameters.
    """
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr, betas=cfg.betas)
    loss_fkt = LOSSES[loss_name](eps=cfg.epsilon)
    lr_scheduler = None
    if cfg.cosine_annealing:
        lr_scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=cfg.epochs)
    return train_model(
        model,
        train_set,
        optimizer,
        cfg.epochs,
        loss_fkt,
        val_dataset=val_set,
        filename=filename,
        projection=projection,
        log_file=log_file,
        lr_scheduler=lr_scheduler,
        rtpt=rtpt,
        wandb=wandb
    )


def print_flow_report(name: str, report: FlowEvalReport):
    """
    Takes the evaluation name and the report and prints the results to the console.
    """
    print(
        f'{name}: \n ' + f'\tPEE: {report.pee_mean:.4f} \t PosPct: {report.pos_pct:.2f} ' +
        f'\t PosPctAll: {report.pos_pct_all:.2f} \t n: {report.n_evaluated} \t masked: {report.n_masked} ' +
        f'\t invalid: {report.n_invalid}' +
        (f'\t Spearman: {report.spearman:.4f}' if report.spearman is not None else '')
    )


def write_results_to_csv(path: str, rows: Sequence[dict]):
    """
    Writes one result row per dictionary. Dataclass instances are converted to dictionaries.
    """
    rows = [dataclasses.asdict(r) if dataclasses.is_dataclass(r) else dict(r) for r in rows]
    if len(path.split(os.sep)) > 1 and not os.path.exists(os.path.dirname(path)):
        os.makedirs(os.path.dirname(path))
    pd.DataFrame(rows).to_csv(path, index=False, float_format='%.17g')


def format_config(configs: dict) -> str:
    """
    One `section.key=value` line per field of the given dataclass configurations.
    """
    lines = []
    for section, cfg in configs.items():
        values = dataclasses.asdict(cfg) if dataclasses.is_dataclass(cfg) else dict(cfg)
        for key, value in values.items():
            lines.append(f'{section}.{key}={value}')
    return '\n'.join(lines)
