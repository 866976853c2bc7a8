"""SNP-type neurons, SLP-Net blocks and the assembled model."""

from slpnet.nn.blocks import Head, InitBlock, SDSBlock, SFABlock, SLPBlock, Upsample
from slpnet.nn.checkpoint import load_checkpoint, load_into, save_checkpoint
from slpnet.nn.layers import Activation, Conv2d
from slpnet.nn.model import SLPNet, build, count_flops, count_params, params_mb
from slpnet.nn.module import Module, ParamEntry, ParamStore
from slpnet.nn.snp import ConvChain, ConvSNP, MSConvSNP, conventional_forward

__all__ = [
    "Activation",
    "Conv2d",
    "ConvChain",
    "ConvSNP",
    "Head",
    "InitBlock",
    "MSConvSNP",
    "Module",
    "ParamEntry",
    "ParamStore",
    "SDSBlock",
    "SFABlock",
    "SLPBlock",
    "SLPNet",
    "Upsample",
    "build",
    "conventional_forward",
    "count_flops",
    "count_params",
    "load_checkpoint",
    "load_into",
    "params_mb",
    "save_checkpoint",
]
