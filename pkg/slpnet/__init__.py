"""SLP-Net: lightweight skin-lesion segmentation built from SNP-type convolution neurons."""

__version__ = "1.0.0"
