"""Network definitions: a LeNet-style classifier and a skip-connection
convolutional autoencoder for intensity reconstruction.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class LeNet(nn.Module):
    """Classic two-conv / two-pool / two-dense classifier with ReLU.

    Exact configuration: conv5x5(in->6, pad 2), pool2, conv5x5(6->16),
    pool2, fc->120, fc->84, fc->classes.
    """

    def __init__(self, in_channels: int, num_classes: int, image_size: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, 6, kernel_size=5, padding=2)
        self.conv2 = nn.Conv2d(6, 16, kernel_size=5)
        side = ((image_size // 2) - 4) // 2
        self.fc1 = nn.Linear(16 * side * side, 120)
        self.fc2 = nn.Linear(120, 84)
        self.fc3 = nn.Linear(84, num_classes)

    def forward(self, x):
        x = F.max_pool2d(F.relu(self.conv1(x)), 2)
        x = F.max_pool2d(F.relu(self.conv2(x)), 2)
        x = torch.flatten(x, 1)
        x = F.relu(self.fc1(x))
        x = F.relu(self.fc2(x))
        return self.fc3(x)


class _EncoderUnit(nn.Module):
    def __init__(self, cin, cout, slope):
        super().__init__()
        self.conv1 = nn.Conv2d(cin, cout, 3, padding=1)
        self.conv2 = nn.Conv2d(cout, cout, 3, padding=1)
        self.slope = slope

    def forward(self, x):
        x = F.leaky_relu(self.conv1(x), self.slope)
        x = F.leaky_relu(self.conv2(x), self.slope)
        return x  # pre-pool activation, also the skip connection


class _DecoderUnit(nn.Module):
    def __init__(self, cin, skip_channels, cout, slope):
        super().__init__()
        self.conv1 = nn.Conv2d(cin + skip_channels, cout, 3, padding=1)
        self.conv2 = nn.Conv2d(cout, cout, 3, padding=1)
        self.slope = slope

    def forward(self, x, skip):
        x = F.interpolate(x, scale_factor=2, mode="nearest")
        x = torch.cat([x, skip], dim=1)
        x = F.leaky_relu(self.conv1(x), self.slope)
        x = F.leaky_relu(self.conv2(x), self.slope)
        return x


class SkipAutoencoder(nn.Module):
    """Five encoder units (two 3x3 convs + leaky ReLU, 2x2 max pool) and a
    symmetric five-unit decoder (2x upsample, concat with the matching
    encoder activation, two convs), ending in a sigmoid.

    Input height and width must be divisible by 2^5 = 32; output shape
    equals input shape.
    """

    DEPTH = 5

    def __init__(self, widths=(32, 64, 128, 256, 512), slope: float = 0.2):
        super().__init__()
        if len(widths) != self.DEPTH:
            raise ValueError(f"expected {self.DEPTH} widths, got {len(widths)}")
        self.encoders = nn.ModuleList()
        cin = 1
        for w in widths:
            self.encoders.append(_EncoderUnit(cin, w, slope))
            cin = w
        self.decoders = nn.ModuleList()
        rev = list(widths)[::-1]  # decoder unit i pairs with encoder unit DEPTH-i
        for i, w in enumerate(rev):
            cout = rev[i + 1] if i + 1 < len(rev) else rev[-1]
            self.decoders.append(_DecoderUnit(cin, w, cout, slope))
            cin = cout
        self.head = nn.Conv2d(cin, 1, 1)

    def forward(self, x):
        h, w = x.shape[-2:]
        if h % 32 or w % 32:
            raise ValueError(f"input size must be divisible by 32, got {h}x{w}")
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = F.max_pool2d(x, 2)
        for dec, skip in zip(self.decoders, reversed(skips)):
            x = dec(x, skip)
        return torch.sigmoid(self.head(x))
