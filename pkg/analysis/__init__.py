# Statistical estimators
