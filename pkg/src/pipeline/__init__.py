"""Pipeline module"""
from .verification_pipeline import RunConfig, RunReport, VerificationPipeline

__all__ = ['RunConfig', 'RunReport', 'VerificationPipeline']
