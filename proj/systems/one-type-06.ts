# X spawns two children with probability 0.6
init X
X -> X X : 0.6
X -> : 0.4
