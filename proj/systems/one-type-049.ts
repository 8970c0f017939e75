# X spawns two children with probability 0.49
init X
X -> X X : 0.49
X -> : 0.51
