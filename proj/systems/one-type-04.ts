# X spawns two children with probability 0.4
init X
X -> X X : 0.4
X -> : 0.6
