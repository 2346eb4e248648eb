from .params import *
