int x_ensemble;
