import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from tqdm.autonotebook import tqdm

from datasets.event_slice_dataset import EventSliceDataset
from metrics.flow_metrics import pee
from models.model_io import save_model
from models.veckm import RandomProjection
from utils.errors import EmptyDataset
from utils.losses import MotionFieldLoss
from utils.validation import evaluate, sign_correctness


@dataclass
class TrainConfig:
    epsilon: float = 0.1
    lr: float = 1e-3
    betas: tuple = (0.9, 0.999)
    epochs: int = 10
    steps_per_epoch: int = 50
    seed: int = 0
    norm_range: tuple = (0.01, 3.0)
    slice_length: float = 0.02
    cosine_annealing: bool = True

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError('epsilon has to be positive')
        if not (0 < self.norm_range[0] < self.norm_range[1]):
            raise ValueError('Invalid flow norm sampling range')


def train_model(
    model,
    dataset: EventSliceDataset,
    optimizer,
    num_epochs,
    loss_fkt=MotionFieldLoss(),
    val_dataset: Optional[EventSliceDataset] = None,
    filename=None,
    projection: Optional[RandomProjection] = None,
    log_file=None,
    lr_scheduler=None,
    rtpt=None,
    wandb=None
):
    """
    Trains the normal flow head on encoded event slices. Every step consumes one slice.
    Returns the list of per-epoch mean losses.
    """
    if len(dataset) == 0:
        raise EmptyDataset('The training dataset is empty')
    model = model.to(model.device)
    trainloader = torch.utils.data.DataLoader(dataset, batch_size=None, shuffle=False, num_workers=0)

    log = None
    if log_file:
        log = open(log_file, 'w')
        log.write('epoch,mean_loss,mean_pee_train\n')

    epoch_losses = []
    try:
        for epoch in range(num_epochs):
            dataset.set_epoch(epoch)
            model.train()
            running_loss = 0.0
            pee_values = []
            for x, y, weight in tqdm(trainloader, total=len(trainloader), desc=f"Epoch {epoch}", leave=False):
                x, y, weight = x.to(model.device), y.to(model.device), weight.to(model.device)
                optimizer.zero_grad()
                output = model(x)
                loss = loss_fkt(output, y, weight)
                loss.backward()
                optimizer.step()
                running_loss += loss.item()

                with torch.no_grad():
                    errors = pee(y.cpu().double().numpy(), output.detach().cpu().double().numpy())
                    errors = errors[weight.cpu().numpy() > 0]
                    if np.isfinite(errors).any():
                        pee_values.append(np.nanmean(errors))

            if lr_scheduler:
                lr_scheduler.step()

            mean_loss = running_loss / len(trainloader)
            mean_pee = float(np.mean(pee_values)) if pee_values else float('nan')
            epoch_losses.append(mean_loss)

            if wandb:
                wandb.log({"Training Loss": mean_loss, "Training PEE": mean_pee, "epoch": epoch})

            val_pee, val_pos = float('nan'), float('nan')
            if val_dataset is not None:
                val_pee = evaluate(model, val_dataset)
                val_pos = sign_correctness(model, val_dataset)
                if wandb:
                    wandb.log({"Validation PEE": val_pee, "Validation PosPct": val_pos, "epoch": epoch})

            print(f'Epoch {epoch}: Training Loss={mean_loss:.4f} \t Training PEE={mean_pee:.4f} '
                  f'\t Validation PEE={val_pee:.4f} \t Validation PosPct={val_pos:.2f}')
            if log:
                log.write(f'{epoch},{mean_loss!r},{mean_pee!r}\n')
                log.flush()

            if rtpt:
                rtpt.step()
    finally:
        if log:
            log.close()

    if filename:
        if len(filename.split(os.sep)) > 1 and not os.path.exists(os.path.dirname(filename)):
            os.makedirs(os.path.dirname(filename))
        if projection is None:
            raise ValueError('The random projection is needed to write a model file')
        save_model(filename, model, projection)

    return epoch_losses

